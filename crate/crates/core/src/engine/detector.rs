//! Drift detectors fed with one loss value per step.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Flag {
    #[default]
    None,
    Warn,
    Drift,
}

impl Flag {
    pub fn name(self) -> &'static str {
        match self {
            Flag::None => "none",
            Flag::Warn => "warn",
            Flag::Drift => "drift",
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DetectorSpec {
    None,
    /// Error-rate monitoring: warn at `p + s > p_min + warn·s_min`, drift at
    /// `drift·s_min`, after at least `min_samples` losses.
    Ddm { warn: f64, drift: f64, min_samples: usize },
    /// Mean of the last `window` losses against the reference: every loss
    /// since the last reset that has left the recent window. Flags when the
    /// gap exceeds `kappa · sqrt(2·var_ref / window)`.
    Sliding { window: usize, kappa: f64 },
    /// Fires exactly at the given stream steps.
    Oracle { at: BTreeSet<usize> },
}

impl DetectorSpec {
    pub fn ddm() -> Self {
        DetectorSpec::Ddm {
            warn: 2.0,
            drift: 3.0,
            min_samples: 30,
        }
    }

    pub fn sliding(window: usize, kappa: f64) -> Self {
        DetectorSpec::Sliding { window, kappa }
    }

    pub fn oracle(at: impl IntoIterator<Item = usize>) -> Self {
        DetectorSpec::Oracle {
            at: at.into_iter().collect(),
        }
    }

    pub fn build(&self) -> Result<Detector> {
        match self {
            DetectorSpec::Ddm { warn, drift, .. } if !(*warn > 0.0 && drift > warn) => {
                return Err(Error::Config("ddm: need 0 < warn < drift".into()))
            }
            DetectorSpec::Sliding { window, kappa } if *window == 0 || !(*kappa > 0.0) => {
                return Err(Error::Config("sliding: need window >= 1 and kappa > 0".into()))
            }
            _ => {}
        }
        Ok(Detector {
            spec: self.clone(),
            state: State::default(),
        })
    }
}

impl FromStr for DetectorSpec {
    type Err = Error;

    /// `none`, `ddm[:warn=2,drift=3,min=30]`, `sliding[:w=100,kappa=3]`,
    /// `oracle:at=1000;2000`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = std::collections::BTreeMap::new();
        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got `{pair}`")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let num = |k: &str, d: f64| -> Result<f64> {
            kv.get(k).map_or(Ok(d), |v| v.parse().map_err(|_| Error::Config(format!("bad `{k}={v}`"))))
        };
        let spec = match kind.trim() {
            "none" => DetectorSpec::None,
            "ddm" => DetectorSpec::Ddm {
                warn: num("warn", 2.0)?,
                drift: num("drift", 3.0)?,
                min_samples: num("min", 30.0)? as usize,
            },
            "sliding" | "sliding-threshold" => DetectorSpec::Sliding {
                window: num("w", 100.0)? as usize,
                kappa: num("kappa", 3.0)?,
            },
            "oracle" => DetectorSpec::Oracle {
                at: kv
                    .get("at")
                    .map(|v| v.split(';').map(|t| t.trim().parse::<usize>()).collect::<Result<_, _>>())
                    .transpose()
                    .map_err(|_| Error::Config("oracle: `at` must list step indices".into()))?
                    .unwrap_or_default(),
            },
            other => return Err(Error::Config(format!("unknown detector `{other}`"))),
        };
        spec.build()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Default)]
struct State {
    n: usize,
    errors: f64,
    has_min: bool,
    p_min: f64,
    s_min: f64,
    ref_n: usize,
    ref_mean: f64,
    ref_m2: f64,
    recent: VecDeque<f64>,
    recent_sum: f64,
}

/// Detector with its running statistics; statistics cover the losses seen
/// since the last reset.
#[derive(Debug, Clone)]
pub struct Detector {
    spec: DetectorSpec,
    state: State,
}

impl Detector {
    pub fn spec(&self) -> &DetectorSpec {
        &self.spec
    }

    /// Losses seen since the last reset.
    pub fn observed(&self) -> usize {
        self.state.n
    }

    pub fn reset(&mut self) {
        self.state = State::default();
    }

    /// Feeds the loss of stream step `step`. A drift flag resets the
    /// statistics.
    pub fn update(&mut self, step: usize, loss: f64) -> Flag {
        let st = &mut self.state;
        st.n += 1;
        let flag = match &self.spec {
            DetectorSpec::None => Flag::None,
            DetectorSpec::Oracle { at } => {
                if at.contains(&step) {
                    Flag::Drift
                } else {
                    Flag::None
                }
            }
            DetectorSpec::Ddm {
                warn,
                drift,
                min_samples,
            } => {
                st.errors += loss;
                let n = st.n as f64;
                let p = st.errors / n;
                let s = (p * (1.0 - p) / n).sqrt();
                if st.n < *min_samples {
                    Flag::None
                } else {
                    if !st.has_min || p + s < st.p_min + st.s_min {
                        st.has_min = true;
                        st.p_min = p;
                        st.s_min = s;
                    }
                    if p + s > st.p_min + drift * st.s_min {
                        Flag::Drift
                    } else if p + s > st.p_min + warn * st.s_min {
                        Flag::Warn
                    } else {
                        Flag::None
                    }
                }
            }
            DetectorSpec::Sliding { window, kappa } => {
                let w = *window;
                st.recent.push_back(loss);
                st.recent_sum += loss;
                if st.recent.len() > w {
                    // the oldest recent loss joins the reference
                    let old = st.recent.pop_front().unwrap_or(0.0);
                    st.recent_sum -= old;
                    st.ref_n += 1;
                    let d = old - st.ref_mean;
                    st.ref_mean += d / st.ref_n as f64;
                    st.ref_m2 += d * (old - st.ref_mean);
                }
                if st.ref_n < w {
                    Flag::None
                } else {
                    let var = (st.ref_m2 / st.ref_n as f64).max(1.0 / w as f64);
                    let sigma = (2.0 * var / w as f64).sqrt();
                    if st.recent_sum / w as f64 > st.ref_mean + kappa * sigma {
                        Flag::Drift
                    } else {
                        Flag::None
                    }
                }
            }
        };
        if flag == Flag::Drift {
            self.reset();
        }
        flag
    }
}
