//! On-disk coefficient cache: one versioned JSON record per solved system.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::ring::{Coeff, Jet, UPoly};
use super::series::Series;

/// Bumped whenever the record layout or any solver convention changes.
pub const CACHE_FORMAT_VERSION: u32 = 1;

/// Identifies a cached record. `variant` carries the case-1 root-sum flag.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub kind: String,
    pub pattern: Option<(usize, usize)>,
    pub variant: String,
    pub order_x: usize,
    pub jet_order: Option<usize>,
}

impl CacheKey {
    fn file_name(&self) -> String {
        let pat = self
            .pattern
            .map(|(i, j)| format!("{i}-{j}"))
            .unwrap_or_else(|| "none".into());
        let jet = self
            .jet_order
            .map(|j| format!("J{j}"))
            .unwrap_or_else(|| "full".into());
        format!(
            "v{}_{}_{}_{}_N{}_{}.json",
            CACHE_FORMAT_VERSION, self.kind, pat, self.variant, self.order_x, jet
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub format_version: u32,
    pub kind: String,
    pub pattern: Option<(usize, usize)>,
    pub variant: String,
    pub order_x: usize,
    pub jet_order: Option<usize>,
    /// Series name → per-degree coefficient, each a list of decimal strings
    /// (polynomial coefficients in `u`, or jet components).
    pub coefficients: BTreeMap<String, Vec<Vec<String>>>,
}

impl CacheRecord {
    pub fn new(key: &CacheKey) -> Self {
        CacheRecord {
            format_version: CACHE_FORMAT_VERSION,
            kind: key.kind.clone(),
            pattern: key.pattern,
            variant: key.variant.clone(),
            order_x: key.order_x,
            jet_order: key.jet_order,
            coefficients: BTreeMap::new(),
        }
    }

    pub fn matches(&self, key: &CacheKey) -> bool {
        self.format_version == CACHE_FORMAT_VERSION
            && self.kind == key.kind
            && self.pattern == key.pattern
            && self.variant == key.variant
            && self.order_x == key.order_x
            && self.jet_order == key.jet_order
    }

    pub fn put<C: CoeffCodec>(&mut self, name: &str, s: &Series<C>) {
        let enc = s.coeffs().iter().map(CoeffCodec::encode).collect();
        self.coefficients.insert(name.to_owned(), enc);
    }

    pub fn get<C: CoeffCodec>(&self, name: &str, proto: &C) -> Option<Series<C>> {
        let raw = self.coefficients.get(name)?;
        let coeffs: Option<Vec<C>> = raw.iter().map(|c| C::decode(c, proto)).collect();
        let coeffs = coeffs?;
        (!coeffs.is_empty()).then(|| Series::from_coeffs(coeffs))
    }
}

/// Decimal-string encoding of a coefficient.
pub trait CoeffCodec: Coeff {
    /// Track name used in cache keys.
    const TRACK: &'static str;
    /// Jet order, for the jet track.
    fn jet_order(&self) -> Option<usize> {
        None
    }
    fn encode(&self) -> Vec<String>;
    fn decode(raw: &[String], proto: &Self) -> Option<Self>;
}

fn parse_all(raw: &[String]) -> Option<Vec<BigInt>> {
    raw.iter().map(|s| s.parse().ok()).collect()
}

impl CoeffCodec for BigInt {
    const TRACK: &'static str = "univariate";

    fn encode(&self) -> Vec<String> {
        vec![self.to_string()]
    }

    fn decode(raw: &[String], _proto: &Self) -> Option<Self> {
        match raw {
            [one] => one.parse().ok(),
            _ => None,
        }
    }
}

impl CoeffCodec for UPoly {
    const TRACK: &'static str = "bivariate";

    fn encode(&self) -> Vec<String> {
        self.coeffs().iter().map(ToString::to_string).collect()
    }

    fn decode(raw: &[String], _proto: &Self) -> Option<Self> {
        parse_all(raw).map(UPoly::new)
    }
}

impl CoeffCodec for Jet {
    const TRACK: &'static str = "jet";

    fn jet_order(&self) -> Option<usize> {
        Some(self.order())
    }

    fn encode(&self) -> Vec<String> {
        self.components().iter().map(ToString::to_string).collect()
    }

    fn decode(raw: &[String], proto: &Self) -> Option<Self> {
        let c = parse_all(raw)?;
        (c.len() == proto.order()).then(|| Jet::from_components(c))
    }
}

/// Directory-backed cache. Unreadable or stale records count as misses.
#[derive(Clone, Debug)]
pub struct CoeffCache {
    dir: PathBuf,
}

impl CoeffCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CoeffCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    pub fn load(&self, key: &CacheKey) -> Option<CacheRecord> {
        let text = fs::read_to_string(self.path_for(key)).ok()?;
        let rec: CacheRecord = serde_json::from_str(&text).ok()?;
        rec.matches(key).then_some(rec)
    }

    pub fn store(&self, key: &CacheKey, record: &CacheRecord) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let tmp = self.path_for(key).with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_vec(record)?)?;
        fs::rename(tmp, self.path_for(key))
    }
}
