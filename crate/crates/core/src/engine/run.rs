//! The test-then-train loop.

use std::collections::VecDeque;
use std::fmt;
use std::io;
use std::str::FromStr;

use crate::distribution::{Provenance, Sample};
use crate::error::{domain, Error, Result};
use crate::learners::{self, Classifier, LearnerSpec};
use crate::types::{Instance, Label, LossFunction};

use super::detector::{Detector, DetectorSpec, Flag};

/// Points in arrival order with the declared change points.
#[derive(Debug, Clone, Default)]
pub struct StreamSource {
    points: Vec<(Instance, Label)>,
    change_points: Vec<usize>,
}

impl StreamSource {
    pub fn new(points: Vec<(Instance, Label)>, change_points: Vec<usize>) -> Result<Self> {
        if let Some((first, _)) = points.first() {
            let schema = first.schema();
            for (x, _) in &points {
                schema.check(x)?;
            }
        }
        if change_points.windows(2).any(|w| w[0] >= w[1]) {
            return domain("change points must be strictly increasing");
        }
        if change_points.iter().any(|&c| c == 0 || c >= points.len()) {
            return domain("change point outside the stream");
        }
        Ok(Self {
            points,
            change_points,
        })
    }

    /// Concatenates the segments; each segment boundary becomes a change
    /// point. Empty segments are rejected.
    pub fn from_segments(segments: &[Sample]) -> Result<Self> {
        let mut points = Vec::new();
        let mut cps = Vec::new();
        for (i, s) in segments.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::EmptySample);
            }
            if i > 0 {
                cps.push(points.len());
            }
            points.extend(s.points.iter().cloned());
        }
        Self::new(points, cps)
    }

    pub fn points(&self) -> &[(Instance, Label)] {
        &self.points
    }

    pub fn change_points(&self) -> &[usize] {
        &self.change_points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Adaptation {
    /// Collect the next `init` points, then refit on them.
    #[default]
    Retrain,
    /// Restore the model fitted at warm-up.
    Reset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    Passive,
    Active(Adaptation),
    Hybrid(Adaptation),
}

impl Policy {
    fn trains(self) -> bool {
        matches!(self, Policy::Passive | Policy::Hybrid(_))
    }

    fn adaptation(self) -> Option<Adaptation> {
        match self {
            Policy::Passive => None,
            Policy::Active(a) | Policy::Hybrid(a) => Some(a),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, a) = match self {
            Policy::Passive => return f.write_str("passive"),
            Policy::Active(a) => ("active", a),
            Policy::Hybrid(a) => ("hybrid", a),
        };
        match a {
            Adaptation::Retrain => f.write_str(name),
            Adaptation::Reset => write!(f, "{name}:reset"),
        }
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, adapt) = s.split_once(':').unwrap_or((s, "retrain"));
        let a = match adapt {
            "retrain" => Adaptation::Retrain,
            "reset" => Adaptation::Reset,
            other => return Err(Error::Config(format!("unknown adaptation `{other}`"))),
        };
        match name {
            "passive" => Ok(Policy::Passive),
            "active" => Ok(Policy::Active(a)),
            "hybrid" => Ok(Policy::Hybrid(a)),
            other => Err(Error::Config(format!("unknown policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Action {
    #[default]
    None,
    /// Incremental update with the current point.
    Update,
    /// Batch refit on the FIFO buffer.
    Refit,
    /// Drift detected; collection of retraining points starts.
    Detect,
    Collect,
    /// Refit on the collected points.
    Retrain,
    /// Back to the warm-up model.
    Reset,
}

impl Action {
    pub fn name(self) -> &'static str {
        match self {
            Action::None => "none",
            Action::Update => "update",
            Action::Refit => "refit",
            Action::Detect => "detect",
            Action::Collect => "collect",
            Action::Retrain => "retrain",
            Action::Reset => "reset",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    /// Index into the stream.
    pub step: usize,
    pub loss: f64,
    pub flag: Flag,
    pub action: Action,
}

/// One record per evaluated (post-warm-up) point.
#[derive(Debug, Clone, Default)]
pub struct StreamLog {
    pub records: Vec<StepRecord>,
    pub init: usize,
    pub change_points: Vec<usize>,
}

impl StreamLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn losses(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.loss).collect()
    }

    pub fn mean_itte(&self) -> f64 {
        if self.records.is_empty() {
            return f64::NAN;
        }
        self.records.iter().map(|r| r.loss).sum::<f64>() / self.records.len() as f64
    }

    /// Mean loss over records with `from <= step < to`.
    pub fn mean_between(&self, from: usize, to: usize) -> f64 {
        let v: Vec<f64> = self
            .records
            .iter()
            .filter(|r| (from..to).contains(&r.step))
            .map(|r| r.loss)
            .collect();
        if v.is_empty() {
            f64::NAN
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    }

    /// Steps at which the detector flagged drift.
    pub fn detections(&self) -> Vec<usize> {
        self.records
            .iter()
            .filter(|r| r.flag == Flag::Drift)
            .map(|r| r.step)
            .collect()
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Io(io::Error::other(e));
        w.write_record(["step", "loss", "flag", "action"]).map_err(csv_err)?;
        for r in &self.records {
            w.write_record([
                r.step.to_string(),
                r.loss.to_string(),
                r.flag.name().to_string(),
                r.action.name().to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        let det: Vec<String> = self.detections().iter().map(|d| d.to_string()).collect();
        format!(
            "{{ steps: {}, init: {}, mean_itte: {:.6}, detections: [{}] }}",
            self.len(),
            self.init,
            self.mean_itte(),
            det.join(", ")
        )
    }
}

/// Trailing mean over `w` records, defined from the `w`-th record on.
pub fn windowed_itte(log: &StreamLog, w: usize) -> Result<Vec<f64>> {
    if w == 0 {
        return domain("window must be at least 1");
    }
    let losses = log.losses();
    if losses.len() < w {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(losses.len() - w + 1);
    let mut sum: f64 = losses[..w].iter().sum();
    out.push(sum / w as f64);
    for k in w..losses.len() {
        sum += losses[k] - losses[k - w];
        out.push(sum / w as f64);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub policy: Policy,
    pub loss: LossFunction,
    /// Warm-up length; also the FIFO buffer and retraining length.
    pub init: usize,
    /// Batch refit period under passive adaptation.
    pub refit_every: usize,
}

pub const DEFAULT_INIT: usize = 200;
pub const DEFAULT_REFIT_EVERY: usize = 50;

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            policy: Policy::Passive,
            loss: LossFunction::ZeroOne,
            init: DEFAULT_INIT,
            refit_every: DEFAULT_REFIT_EVERY,
        }
    }
}

/// Builds the learner from `spec` (seeded with `seed`) and runs the loop.
pub fn run_stream(
    source: &StreamSource,
    spec: &LearnerSpec,
    detector: &DetectorSpec,
    policy: Policy,
    loss: LossFunction,
    init: usize,
    seed: u64,
) -> Result<StreamLog> {
    let model = learners::build(&spec.clone().with_seed(seed))?;
    let cfg = RunConfig {
        policy,
        loss,
        init,
        ..RunConfig::default()
    };
    run_stream_with(source, model, detector, &cfg).map(|(log, _)| log)
}

fn as_sample(points: impl IntoIterator<Item = (Instance, Label)>) -> Sample {
    Sample {
        points: points.into_iter().collect(),
        provenance: Provenance {
            window: "stream".into(),
            seed: 0,
        },
    }
}

/// Runs the loop with a caller-supplied learner; returns the log and the
/// final model.
pub fn run_stream_with(
    source: &StreamSource,
    mut model: Box<dyn Classifier>,
    detector: &DetectorSpec,
    cfg: &RunConfig,
) -> Result<(StreamLog, Box<dyn Classifier>)> {
    let init = cfg.init;
    if init == 0 {
        return domain("init must be at least 1");
    }
    if source.len() <= init {
        return domain(format!("stream of {} points is not longer than init={init}", source.len()));
    }
    if cfg.refit_every == 0 {
        return domain("refit period must be at least 1");
    }
    let mut det: Detector = detector.build()?;
    let pts = source.points();

    model.fit(&as_sample(pts[..init].iter().cloned()))?;
    let h0 = model.clone();
    let incremental = model.is_incremental();
    let mut buffer: VecDeque<(Instance, Label)> = pts[..init].iter().cloned().collect();
    let mut since_refit = 0usize;
    let mut collecting: Option<Vec<(Instance, Label)>> = None;

    let mut records = Vec::with_capacity(pts.len() - init);
    for (step, (x, y)) in pts.iter().enumerate().skip(init) {
        // test ...
        let loss = match cfg.loss {
            LossFunction::ZeroOne => cfg.loss.eval(model.predict(x)?.as_f64(), *y),
            LossFunction::Mse => cfg.loss.eval(model.score(x)?, *y),
        };

        // ... then train
        let mut flag = Flag::None;
        let action;
        if let Some(buf) = collecting.as_mut() {
            buf.push((x.clone(), *y));
            action = Action::Collect;
        } else {
            flag = det.update(step, loss);
            match (flag, cfg.policy.adaptation()) {
                (Flag::Drift, Some(Adaptation::Retrain)) => {
                    collecting = Some(vec![(x.clone(), *y)]);
                    action = Action::Detect;
                }
                (Flag::Drift, Some(Adaptation::Reset)) => {
                    model = h0.clone();
                    det.reset();
                    action = Action::Reset;
                }
                _ if cfg.policy.trains() => {
                    if incremental {
                        model.update(x, *y)?;
                        action = Action::Update;
                    } else {
                        buffer.push_back((x.clone(), *y));
                        if buffer.len() > init {
                            buffer.pop_front();
                        }
                        since_refit += 1;
                        if since_refit == cfg.refit_every {
                            since_refit = 0;
                            model.fit(&as_sample(buffer.iter().cloned()))?;
                            action = Action::Refit;
                        } else {
                            action = Action::None;
                        }
                    }
                }
                _ => action = Action::None,
            }
        }
        let mut action = action;
        if collecting.as_ref().is_some_and(|b| b.len() >= init) {
            let fresh = collecting.take().unwrap_or_default();
            model.reset();
            model.fit(&as_sample(fresh.iter().cloned()))?;
            buffer = fresh.into_iter().collect();
            since_refit = 0;
            det.reset();
            action = Action::Retrain;
        }
        records.push(StepRecord {
            step,
            loss,
            flag,
            action,
        });
    }
    let log = StreamLog {
        records,
        init,
        change_points: source.change_points().to_vec(),
    };
    Ok((log, model))
}

/// Share of probe points on which two models predict the same label.
pub fn decision_agreement(a: &dyn Classifier, b: &dyn Classifier, probe: &[Instance]) -> Result<f64> {
    if probe.is_empty() {
        return domain("empty probe set");
    }
    let mut same = 0usize;
    for x in probe {
        same += (a.predict(x)? == b.predict(x)?) as usize;
    }
    Ok(same as f64 / probe.len() as f64)
}
