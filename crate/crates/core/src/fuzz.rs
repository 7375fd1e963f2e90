//! Randomized cross-checks of the engine against the reference oracles.

use std::fmt;

use crate::arcstr::ArcAnnotatedString;
use crate::engine::{naps, EngineConfig, EngineError, Mode};
use crate::gen::Generator;
use crate::oracle::{embed_exists_with_cap, gamma_def, gamma_rec, DEFAULT_CAP};

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub count: usize,
    pub max_m: usize,
    pub max_n: usize,
    pub seed: u64,
    /// Texts up to this length are also checked by exhaustive search.
    pub search_cap: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            count: 1000,
            max_m: 8,
            max_n: 10,
            seed: 0,
            search_cap: DEFAULT_CAP.min(12),
        }
    }
}

/// The first instance on which two computations disagreed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub index: usize,
    pub pattern: ArcAnnotatedString,
    pub text: ArcAnnotatedString,
    pub detail: String,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "divergence on instance {}: {}", self.index, self.detail)?;
        writeln!(
            f,
            "  pattern {} {}",
            self.pattern.sequence(),
            self.pattern.structure()
        )?;
        write!(
            f,
            "  text    {} {}",
            self.text.sequence(),
            self.text.structure()
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FuzzReport {
    pub checked: usize,
    pub agreed: usize,
    /// Instances small enough for the exhaustive search.
    pub searched: usize,
    pub positives: usize,
    pub divergence: Option<Divergence>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.divergence.is_none()
    }
}

/// What one instance check established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Agreement {
    pub gamma_root: usize,
    pub is_subsequence: bool,
    pub searched: bool,
}

/// Runs all engine modes and every oracle that fits, returning the first
/// disagreement as text.
pub fn check_instance(
    p: &ArcAnnotatedString,
    q: &ArcAnnotatedString,
    search_cap: usize,
) -> Result<Agreement, String> {
    let err = |e: EngineError| format!("engine error: {e}");
    let base = naps(p, q, EngineConfig::new(Mode::Uncompressed)).map_err(err)?;
    for mode in [Mode::CompressDecompress, Mode::CompressRandomAccess] {
        let r = naps(p, q, EngineConfig::new(mode)).map_err(err)?;
        if r.root != base.root {
            return Err(format!(
                "{mode} gives {:?}, uncompressed gives {:?}",
                r.root.values(),
                base.root.values()
            ));
        }
    }
    let (m, n) = (p.len(), q.len());
    let rec = gamma_rec(p, q, 1, m, 1, n);
    if rec != base.gamma_root {
        return Err(format!(
            "engine gamma_root {} but recurrence gives {rec}",
            base.gamma_root
        ));
    }
    let searched = n <= search_cap;
    if searched {
        let found = embed_exists_with_cap(p.as_view(), q.as_view(), search_cap)
            .map_err(|e| e.to_string())?
            .is_some();
        if found != base.is_subsequence {
            return Err(format!(
                "engine decides {} but exhaustive search decides {found}",
                base.is_subsequence
            ));
        }
        let def = gamma_def(p, q, 1, m, 1, n).map_err(|e| e.to_string())?;
        if def != base.gamma_root {
            return Err(format!(
                "engine gamma_root {} but definition gives {def}",
                base.gamma_root
            ));
        }
    }
    Ok(Agreement {
        gamma_root: base.gamma_root,
        is_subsequence: base.is_subsequence,
        searched,
    })
}

/// Checks `cfg.count` seeded instances, stopping at the first divergence.
pub fn run(cfg: &FuzzConfig) -> FuzzReport {
    let mut gen = Generator::new(cfg.seed);
    let mut report = FuzzReport::default();
    for index in 0..cfg.count {
        let (p, q) = gen.instance(cfg.max_m, cfg.max_n);
        report.checked += 1;
        match check_instance(&p, &q, cfg.search_cap) {
            Ok(a) => {
                report.agreed += 1;
                report.searched += usize::from(a.searched);
                report.positives += usize::from(a.is_subsequence);
            }
            Err(detail) => {
                report.divergence = Some(Divergence {
                    index,
                    pattern: p,
                    text: q,
                    detail,
                });
                break;
            }
        }
    }
    report
}
