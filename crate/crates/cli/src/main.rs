use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use skat_core::cards::{generate_deals_from, read_deal_file, write_deal_file, DealFileHeader, DealRecord, DEAL_ALGORITHM};
use skat_core::features::Question;
use skat_core::orchestrator::{
    bootstrap, emit_report, evaluate, run_selfplay, same_seats, series_header, versus, workers_from_env, write_corpus, BootstrapConfig,
};
use skat_core::pgn::{parse_series_str, series_to_string, split_io};
use skat_core::players::{CardPlay, PolicyConfig};
use skat_core::solver::{solve_record, Solver};
use skat_core::tables::{outer_learning, TableSet, TableStore, WinningTable};

#[derive(Parser)]
#[command(name = "skat", about = "Skat self-play, table learning and open-card evaluation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct PolicyArgs {
    /// key=value policy file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one policy key, e.g. `--set worlds=4`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Worker threads (SKAT_WORKERS overrides the default of 1)
    #[arg(long)]
    workers: Option<usize>,
}

impl PolicyArgs {
    fn policy(&self) -> Result<PolicyConfig> {
        let mut c = PolicyConfig::default();
        if let Some(p) = &self.config {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            c.apply_text(&text)?;
        }
        for o in &self.overrides {
            let Some((k, v)) = o.split_once('=') else {
                bail!("override '{o}' is not key=value")
            };
            c.set(k.trim(), v.trim())?;
        }
        c.validate()?;
        Ok(c)
    }

    fn workers(&self) -> usize {
        self.workers.unwrap_or_else(|| workers_from_env(1))
    }
}

#[derive(Args, Clone)]
struct TableArgs {
    /// Table directory, or a versioned store with a CURRENT file
    #[arg(long)]
    tables: Option<PathBuf>,
    /// Play with empty tables
    #[arg(long)]
    zero_learning: bool,
}

impl TableArgs {
    fn load(&self) -> Result<TableSet> {
        match (&self.tables, self.zero_learning) {
            (_, true) => Ok(TableSet::empty()),
            (Some(p), false) => load_tables(p),
            (None, false) => bail!("no --tables given; pass --zero-learning to play without tables"),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a binary deal file
    Dealgen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        first_id: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Play every deal of a deal file and write the PGN corpus
    Selfplay {
        #[arg(long)]
        deals: PathBuf,
        #[command(flatten)]
        tables: TableArgs,
        #[command(flatten)]
        policy: PolicyArgs,
        /// All seats play random legal cards
        #[arg(long)]
        random_play: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build one table from a deal corpus and the matching played games
    Tablegen {
        #[arg(long)]
        deals: PathBuf,
        #[arg(long)]
        games: PathBuf,
        #[arg(long)]
        question: String,
        #[arg(long)]
        bias: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge two tables of the same question
    Tablemerge {
        a: PathBuf,
        b: PathBuf,
        /// Defaults to the tag in the file name of A
        #[arg(long)]
        question: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare actual results with open-card solver verdicts
    Eval {
        corpus: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the self-play and table learning loop
    Bootstrap {
        #[arg(long, default_value_t = 1)]
        iterations: usize,
        #[arg(long)]
        deals: usize,
        #[arg(long, default_value_t = 0)]
        deal_seed: u64,
        /// Also play the last iteration with random card play
        #[arg(long)]
        baseline: bool,
        /// Initial tables; empty when absent
        #[arg(long)]
        tables: Option<PathBuf>,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Head-to-head series of two table sets on the same deals
    Versus {
        #[arg(long)]
        deals: PathBuf,
        #[arg(long)]
        with: PathBuf,
        /// Opponent tables; empty when absent
        #[arg(long)]
        without: Option<PathBuf>,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Solve the position of one game from a PGN file
    Solve {
        #[arg(long)]
        pgn: PathBuf,
        #[arg(long)]
        id: u64,
    },
    /// PGN corpus tools
    Pgn {
        #[command(subcommand)]
        cmd: PgnCmd,
    },
}

#[derive(Subcommand)]
enum PgnCmd {
    Validate {
        file: PathBuf,
    },
    Split {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        deals: PathBuf,
        #[arg(long)]
        games: PathBuf,
    },
}

fn load_tables(p: &Path) -> Result<TableSet> {
    if !p.is_dir() {
        bail!("table directory {} not found", p.display());
    }
    if p.join("CURRENT").exists() {
        let (_, t) = TableStore::new(p).load_current()?.context("store has no current version")?;
        return Ok(t);
    }
    Ok(TableSet::load_dir(p)?)
}

fn read_deals(p: &Path) -> Result<Vec<DealRecord>> {
    let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
    Ok(read_deal_file(BufReader::new(f))?.1)
}

fn read_pgn(p: &Path) -> Result<Vec<skat_core::pgn::GameRecord>> {
    let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    Ok(parse_series_str(&text)?.1)
}

fn question_for(tag: Option<&str>, path: &Path) -> Result<Question> {
    let tag = match tag {
        Some(t) => t.to_string(),
        None => path
            .file_stem()
            .and_then(|s| s.to_str())
            .context("table file name has no question tag")?
            .to_string(),
    };
    Ok(Question::from_tag(&tag)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Dealgen {
            seed,
            count,
            first_id,
            out,
        } => {
            let deals: Vec<DealRecord> = generate_deals_from(seed, first_id, count).collect();
            let header = DealFileHeader {
                algorithm: DEAL_ALGORITHM.into(),
                seed,
                count: count as u64,
            };
            write_deal_file(BufWriter::new(File::create(&out)?), &header, &deals)?;
            println!("{} deals written to {}", count, out.display());
        }
        Cmd::Selfplay {
            deals,
            tables,
            policy,
            random_play,
            out,
        } => {
            let deals = read_deals(&deals)?;
            let t = tables.load()?;
            let play = if random_play { CardPlay::RandomLegal } else { CardPlay::Table };
            let records = run_selfplay(&deals, &same_seats(&t, play), &policy.policy()?, policy.workers())?;
            write_corpus(&out, "selfplay", &records)?;
            let folded = records.iter().filter(|r| !r.is_played()).count();
            println!("{} games, {} folded, written to {}", records.len(), folded, out.display());
        }
        Cmd::Tablegen {
            deals,
            games,
            question,
            bias,
            out,
        } => {
            let q = Question::from_tag(&question)?;
            let input = read_pgn(&deals)?;
            let output = read_pgn(&games)?;
            let bias = match bias {
                Some(p) => WinningTable::read_file(&p, q)?,
                None => WinningTable::empty(q),
            };
            let (t, stats) = outer_learning(
                &input,
                &output,
                |_, o| !q.applies(o),
                |_, o| skat_core::features::observations(q, o),
                &bias,
            )?;
            fs::write(&out, t.to_text())?;
            println!(
                "{}: {} matched, {} excluded, {} observations, {} buckets",
                q.tag(),
                stats.matched,
                stats.excluded,
                stats.observations,
                t.len()
            );
        }
        Cmd::Tablemerge { a, b, question, out } => {
            let q = question_for(question.as_deref(), &a)?;
            let merged = WinningTable::read_file(&a, q)?.merge(&WinningTable::read_file(&b, q)?)?;
            fs::write(&out, merged.to_text())?;
            println!("{} buckets, {} games", merged.len(), merged.total_games());
        }
        Cmd::Eval { corpus, workers } => {
            let records = read_pgn(&corpus)?;
            let rep = evaluate(&records, workers.unwrap_or_else(|| workers_from_env(1)))?;
            print!("{}", rep.to_table());
            println!(
                "tpr {:.4} fnr {:.4} winning {:.4}",
                rep.true_positive_rate(),
                rep.false_negative_rate(),
                rep.winning_rate()
            );
        }
        Cmd::Bootstrap {
            iterations,
            deals,
            deal_seed,
            baseline,
            tables,
            policy,
            out,
        } => {
            let initial = match tables {
                Some(p) => load_tables(&p)?,
                None => TableSet::empty(),
            };
            let cfg = BootstrapConfig {
                iterations,
                deals_per_iteration: deals,
                deal_seed,
                policy: policy.policy()?,
                workers: policy.workers(),
                baseline,
            };
            let b = bootstrap(&cfg, initial, Some(&out))?;
            for r in &b.runs {
                print!("iteration {} accuracy {:.4}", r.iteration, r.report.accuracy());
                if let Some(base) = &r.baseline {
                    print!(" baseline {:.4}", base.accuracy());
                }
                println!(" table games {}", r.table_games);
            }
            println!("report {}", emit_report(&b.runs, &out)?.display());
        }
        Cmd::Versus {
            deals,
            with,
            without,
            policy,
        } => {
            let deals = read_deals(&deals)?;
            let a = load_tables(&with)?;
            let b = match without {
                Some(p) => load_tables(&p)?,
                None => TableSet::empty(),
            };
            let cfg = policy.policy()?;
            for seating in [[true, true, false], [true, false, false]] {
                let r = versus(&deals, &a, &b, seating, &cfg, policy.workers())?;
                let label: Vec<&str> = seating.iter().map(|&s| if s { "+" } else { "-" }).collect();
                println!("seating {}", label.join(""));
                for (p, res) in r.results.iter().enumerate() {
                    println!(
                        "  seat {} {} score {} won {} lost {}",
                        p + 1,
                        label[p],
                        res.score,
                        res.won,
                        res.lost
                    );
                }
            }
        }
        Cmd::Solve { pgn, id } => {
            let records = read_pgn(&pgn)?;
            let rec = records.iter().find(|r| r.id == id).with_context(|| format!("no game {id}"))?;
            let v = solve_record(&mut Solver::new(), rec)?;
            println!("declarer_can_win {}", v.declarer_can_win);
            println!("best_eyes {}", v.best_eyes);
            if let Some(line) = v.principal_variation {
                let cards: Vec<String> = line.iter().map(|c| c.to_string()).collect();
                println!("line {}", cards.join(" "));
            }
        }
        Cmd::Pgn {
            cmd: PgnCmd::Validate { file },
        } => {
            let records = read_pgn(&file)?;
            for r in &records {
                r.validate().with_context(|| format!("game {}", r.id))?;
            }
            println!("{} games valid", records.len());
        }
        Cmd::Pgn {
            cmd: PgnCmd::Split { input, deals, games },
        } => {
            let records = read_pgn(&input)?;
            let (all, played) = split_io(&records);
            fs::write(&deals, series_to_string(&series_header("deals", &all)?, &all))?;
            fs::write(&games, series_to_string(&series_header("games", &played)?, &played))?;
            println!("{} deals, {} games", all.len(), played.len());
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
