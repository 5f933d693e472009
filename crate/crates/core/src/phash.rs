//! Perfect hashing of feature vectors by fixed-width bit packing.
//!
//! Each field `i` with domain size `|D_i|` gets `l_i = ceil(log2 |D_i|)` bits.
//! Ranking starts from the first field and, for every further field, shifts
//! the key left by that field's bit width before adding the value. The last
//! field therefore occupies the least significant bits and the keys order
//! exactly like the vectors do lexicographically.
//!
//! Unranking reads field `i` back as `(h >> offset_i) & mask_i`, where
//! `offset_i` is the number of bits taken by the fields after `i`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    pub name: String,
    pub domain: u64,
    pub bits: u32,
    /// Distance of the field's lowest bit from bit 0.
    pub offset: u32,
}

impl Field {
    pub fn mask(&self) -> u64 {
        if self.bits == 64 {
            u64::MAX
        } else {
            (1u64 << self.bits) - 1
        }
    }
}

/// Ordered list of feature fields with their packing layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureSchema {
    name: String,
    fields: Vec<Field>,
    total_bits: u32,
}

/// `ceil(log2 n)`; a single-valued domain needs no bits.
pub fn bit_width(domain: u64) -> u32 {
    if domain <= 1 {
        0
    } else {
        64 - (domain - 1).leading_zeros()
    }
}

impl FeatureSchema {
    pub fn new<S: Into<String>>(name: S, fields: &[(&str, u64)]) -> Result<FeatureSchema> {
        let owned: Vec<(String, u64)> = fields.iter().map(|(n, d)| (n.to_string(), *d)).collect();
        Self::from_fields(name.into(), owned)
    }

    fn from_fields(name: String, fields: Vec<(String, u64)>) -> Result<FeatureSchema> {
        if fields.is_empty() {
            return Err(Error::Schema(format!("{name}: no fields")));
        }
        let mut total = 0u32;
        let mut out = Vec::with_capacity(fields.len());
        for (fname, domain) in fields {
            if domain == 0 {
                return Err(Error::Schema(format!("{name}: field {fname} has an empty domain")));
            }
            let bits = bit_width(domain);
            total += bits;
            out.push(Field {
                name: fname,
                domain,
                bits,
                offset: 0,
            });
        }
        if total > 64 {
            return Err(Error::Schema(format!("{name}: {total} bits do not fit a 64-bit key")));
        }
        let mut offset = 0;
        for f in out.iter_mut().rev() {
            f.offset = offset;
            offset += f.bits;
        }
        Ok(FeatureSchema {
            name,
            fields: out,
            total_bits: total,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn total_bits(&self) -> u32 {
        self.total_bits
    }

    /// Number of representable keys, `2^B`.
    pub fn capacity(&self) -> u128 {
        1u128 << self.total_bits
    }

    /// Number of in-domain vectors, `prod |D_i|`.
    pub fn domain_size(&self) -> u128 {
        self.fields.iter().map(|f| f.domain as u128).product()
    }

    /// Schema made of the first `keep` fields.
    pub fn prefix(&self, name: &str, keep: usize) -> Result<FeatureSchema> {
        let keep = keep.clamp(1, self.fields.len());
        Self::from_fields(
            name.to_string(),
            self.fields[..keep].iter().map(|f| (f.name.clone(), f.domain)).collect(),
        )
    }

    pub fn check(&self, v: &FeatureVector) -> Result<()> {
        if v.0.len() != self.fields.len() {
            return Err(Error::SchemaMismatch(format!(
                "{}: vector has {} fields, schema {}",
                self.name,
                v.0.len(),
                self.fields.len()
            )));
        }
        for (i, (f, &x)) in self.fields.iter().zip(&v.0).enumerate() {
            if x >= f.domain {
                return Err(Error::OutOfDomain {
                    field: i,
                    value: x,
                    domain: f.domain,
                });
            }
        }
        Ok(())
    }

    pub fn rank(&self, v: &FeatureVector) -> Result<HashKey> {
        self.check(v)?;
        let mut h = v.0[0];
        for (f, &x) in self.fields.iter().zip(&v.0).skip(1) {
            h = (h << f.bits) + x;
        }
        Ok(HashKey(h))
    }

    pub fn unrank(&self, key: HashKey) -> Result<FeatureVector> {
        if (key.0 as u128) >= self.capacity() {
            return Err(Error::KeyOutOfRange {
                key: key.0,
                capacity: self.capacity().min(u64::MAX as u128) as u64,
            });
        }
        Ok(FeatureVector(self.fields.iter().map(|f| (key.0 >> f.offset) & f.mask()).collect()))
    }

    /// Compares two vectors through their keys.
    pub fn lex_compare_via_keys(&self, a: &FeatureVector, b: &FeatureVector) -> Result<Ordering> {
        Ok(self.rank(a)?.cmp(&self.rank(b)?))
    }

    /// Manifest text: one `name domain_size` line per field.
    pub fn to_manifest(&self) -> String {
        let mut s = format!("# {}\n", self.name);
        for f in &self.fields {
            s.push_str(&format!("{} {}\n", f.name, f.domain));
        }
        s
    }

    /// Parses a manifest. Blank lines and `#` comments are skipped.
    pub fn parse_manifest(name: &str, text: &str) -> Result<FeatureSchema> {
        let mut fields = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(fname), Some(dom), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse {
                    line: no + 1,
                    msg: format!("expected 'name domain_size', got '{line}'"),
                });
            };
            let domain = u64::from_str(dom).map_err(|e| Error::Parse {
                line: no + 1,
                msg: format!("domain: {e}"),
            })?;
            fields.push((fname.to_string(), domain));
        }
        Self::from_fields(name.to_string(), fields)
    }
}

/// Feature values, one per schema field.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureVector(pub Vec<u64>);

impl FeatureVector {
    pub fn values(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for FeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// Packed feature vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HashKey(pub u64);
