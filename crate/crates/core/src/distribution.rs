//! Finite distributions over `(instance, label)` pairs, samples drawn from
//! them, and the expected/empirical losses of a predictor.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use std::cmp::Ordering;

use crate::error::{domain, Error, Result};
use crate::rng;
use crate::types::{Instance, Label, LossFunction, Predictor, Schema};

/// Tolerance on the total mass of a distribution.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub weight: f64,
    pub instance: Instance,
    pub label: Label,
}

impl Atom {
    pub fn new(weight: f64, instance: Instance, label: Label) -> Self {
        Self {
            weight,
            instance,
            label,
        }
    }

    fn cmp_point(&self, other: &Atom) -> Ordering {
        self.instance
            .cmp_key(&other.instance)
            .then(self.label.cmp(&other.label))
    }
}

/// Weighted point masses; the computable stand-in for a data distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    atoms: Vec<Atom>,
    schema: Schema,
}

impl FiniteDistribution {
    /// Validates nonnegative weights summing to one and a shared schema.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let schema = Self::validate_atoms(&atoms)?;
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return domain(format!("atom weights sum to {total}, not 1"));
        }
        Ok(Self { atoms, schema })
    }

    /// Like [`FiniteDistribution::new`] but rescales positive total mass to one.
    pub fn normalized(mut atoms: Vec<Atom>) -> Result<Self> {
        Self::validate_atoms(&atoms)?;
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if total <= 0.0 {
            return domain("distribution has zero total mass");
        }
        for a in &mut atoms {
            a.weight /= total;
        }
        Self::new(atoms)
    }

    /// Uniform distribution over the given points.
    pub fn uniform(points: Vec<(Instance, Label)>) -> Result<Self> {
        let n = points.len() as f64;
        Self::normalized(
            points
                .into_iter()
                .map(|(x, y)| Atom::new(1.0 / n, x, y))
                .collect(),
        )
    }

    /// Single point mass.
    pub fn dirac(x: Instance, y: Label) -> Self {
        let schema = x.schema();
        Self {
            atoms: vec![Atom::new(1.0, x, y)],
            schema,
        }
    }

    fn validate_atoms(atoms: &[Atom]) -> Result<Schema> {
        let first = atoms
            .first()
            .ok_or_else(|| Error::Domain("distribution without atoms".into()))?;
        let schema = first.instance.schema();
        for a in atoms {
            if !(a.weight >= 0.0) || !a.weight.is_finite() {
                return domain(format!("invalid atom weight {}", a.weight));
            }
            schema.check(&a.instance)?;
        }
        Ok(schema)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn schema(&self) -> Schema {
        self.schema
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Merges atoms with identical `(instance, label)`, drops zero-weight
    /// atoms and sorts into a canonical order.
    pub fn merged(&self) -> FiniteDistribution {
        let mut atoms = self.atoms.clone();
        atoms.sort_by(|a, b| a.cmp_point(b));
        let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match out.last_mut() {
                Some(last) if last.cmp_point(&a) == Ordering::Equal => last.weight += a.weight,
                _ => out.push(a),
            }
        }
        out.retain(|a| a.weight > 0.0);
        FiniteDistribution {
            atoms: out,
            schema: self.schema,
        }
    }

    /// Mixture `Σ coefficient_i · d_i`; coefficients must sum to one.
    pub fn mixture(parts: &[(f64, &FiniteDistribution)]) -> Result<Self> {
        let mut atoms = Vec::new();
        for (c, d) in parts {
            if *c < 0.0 {
                return domain("negative mixture coefficient");
            }
            atoms.extend(d.atoms.iter().map(|a| Atom {
                weight: a.weight * c,
                ..a.clone()
            }));
        }
        Ok(FiniteDistribution::normalized(atoms)?.merged())
    }

    /// Total variation distance computed on canonical merged forms.
    pub fn total_variation(&self, other: &FiniteDistribution) -> f64 {
        let a = self.merged();
        let b = other.merged();
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < a.atoms.len() || j < b.atoms.len() {
            let ord = match (a.atoms.get(i), b.atoms.get(j)) {
                (Some(x), Some(y)) => x.cmp_point(y),
                (Some(_), None) => Ordering::Less,
                (None, _) => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    acc += a.atoms[i].weight;
                    i += 1;
                }
                Ordering::Greater => {
                    acc += b.atoms[j].weight;
                    j += 1;
                }
                Ordering::Equal => {
                    acc += (a.atoms[i].weight - b.atoms[j].weight).abs();
                    i += 1;
                    j += 1;
                }
            }
        }
        acc / 2.0
    }

    /// Marginal mass and class-1 probability per distinct instance.
    pub fn posterior(&self) -> Vec<InstancePosterior> {
        let merged = self.merged();
        let mut out: Vec<InstancePosterior> = Vec::new();
        for a in merged.atoms {
            match out.last_mut() {
                Some(last) if last.instance.same_point(&a.instance) => {
                    last.mass += a.weight;
                    if a.label.is_one() {
                        last.positive += a.weight;
                    }
                }
                _ => out.push(InstancePosterior {
                    positive: if a.label.is_one() { a.weight } else { 0.0 },
                    mass: a.weight,
                    instance: a.instance,
                }),
            }
        }
        out
    }

    /// Distinct instances in the support, canonical order.
    pub fn support(&self) -> Vec<Instance> {
        self.posterior().into_iter().map(|p| p.instance).collect()
    }

    /// Atom index for each of `n` inverse-CDF draws.
    fn draw_indices(&self, n: usize, seed: u64) -> impl Iterator<Item = usize> + '_ {
        let cdf: Vec<f64> = self
            .atoms
            .iter()
            .scan(0.0, |acc, a| {
                *acc += a.weight;
                Some(*acc)
            })
            .collect();
        let last = self.atoms.len() - 1;
        let mut rng = rng::rng(seed);
        (0..n).map(move |_| {
            let u: f64 = rng.random::<f64>() * cdf[last];
            cdf.partition_point(|c| *c <= u).min(last)
        })
    }

    /// Multinomial counts per atom for an i.i.d. sample of size `n`, drawn
    /// as a chain of conditional binomials (O(atoms), not O(n)).
    pub fn draw_counts(&self, n: usize, seed: u64) -> Vec<usize> {
        let mut rng = rng::rng(seed);
        let mut counts = vec![0; self.atoms.len()];
        let mut left = n as u64;
        let mut mass: f64 = self.atoms.iter().map(|a| a.weight).sum();
        let last = self.atoms.len() - 1;
        for (i, a) in self.atoms.iter().enumerate() {
            if left == 0 {
                break;
            }
            if i == last {
                counts[i] = left as usize;
                break;
            }
            let p = if mass > 0.0 { (a.weight / mass).clamp(0.0, 1.0) } else { 1.0 };
            let k = Binomial::new(left, p).expect("p in [0, 1]").sample(&mut rng);
            counts[i] = k as usize;
            left -= k;
            mass -= a.weight;
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstancePosterior {
    pub instance: Instance,
    pub mass: f64,
    pub positive: f64,
}

impl InstancePosterior {
    pub fn p_one(&self) -> f64 {
        self.positive / self.mass
    }
}

/// Where a sample came from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub window: String,
    pub seed: u64,
}

/// A finite sequence of labelled points sharing one schema.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Sample {
    pub points: Vec<(Instance, Label)>,
    pub provenance: Provenance,
}

impl Sample {
    pub fn new(points: Vec<(Instance, Label)>, provenance: Provenance) -> Result<Self> {
        if let Some((first, _)) = points.first() {
            let schema = first.schema();
            for (x, _) in &points {
                schema.check(x)?;
            }
        }
        Ok(Self { points, provenance })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn schema(&self) -> Option<Schema> {
        self.points.first().map(|(x, _)| x.schema())
    }

    /// Concatenation of two samples with matching schemas.
    pub fn union(&self, other: &Sample) -> Result<Sample> {
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        Sample::new(
            points,
            Provenance {
                window: format!("{}+{}", self.provenance.window, other.provenance.window),
                seed: self.provenance.seed ^ other.provenance.seed.rotate_left(17),
            },
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Instance, Label)> {
        self.points.iter()
    }
}

/// `n` i.i.d. draws by inverse CDF over atom weights.
pub fn draw_sample(d: &FiniteDistribution, n: usize, seed: u64) -> Result<Sample> {
    if n == 0 {
        return domain("sample size must be at least 1");
    }
    let points = d
        .draw_indices(n, seed)
        .map(|i| {
            let a = &d.atoms[i];
            (a.instance.clone(), a.label)
        })
        .collect();
    Ok(Sample {
        points,
        provenance: Provenance {
            window: "finite".into(),
            seed,
        },
    })
}

fn check_predictor_schema(h: &dyn Predictor, schema: Schema) -> Result<()> {
    match h.input_schema() {
        Some(s) if s != schema => Err(Error::Schema {
            expected: s.to_string(),
            found: schema.to_string(),
        }),
        _ => Ok(()),
    }
}

/// `Σ weight · ℓ(h, (x, y))` over the atoms of `d`.
pub fn expected_loss<P: Predictor + ?Sized>(
    h: &P,
    d: &FiniteDistribution,
    loss: LossFunction,
) -> Result<f64> {
    check_predictor_schema(&h, d.schema())?;
    Ok(d.atoms
        .iter()
        .map(|a| a.weight * loss.eval(h.output(&a.instance), a.label))
        .sum())
}

/// Mean per-point loss over a sample.
pub fn empirical_loss<P: Predictor + ?Sized>(
    h: &P,
    s: &Sample,
    loss: LossFunction,
) -> Result<f64> {
    let schema = s.schema().ok_or(Error::EmptySample)?;
    check_predictor_schema(&h, schema)?;
    let total: f64 = s
        .points
        .iter()
        .map(|(x, y)| loss.eval(h.output(x), *y))
        .sum();
    Ok(total / s.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::FnPredictor;

    fn x(v: f64) -> Instance {
        Instance::from_numeric(vec![v])
    }

    fn two_point(w0: f64) -> FiniteDistribution {
        FiniteDistribution::new(vec![
            Atom::new(w0, x(0.0), Label::ZERO),
            Atom::new(1.0 - w0, x(1.0), Label::ONE),
        ])
        .unwrap()
    }

    #[test]
    fn weights_must_sum_to_one() {
        let bad = FiniteDistribution::new(vec![Atom::new(0.6, x(0.0), Label::ZERO)]);
        assert!(bad.is_err());
        assert!(FiniteDistribution::new(vec![]).is_err());
    }

    #[test]
    fn mixed_schemas_rejected() {
        let d = FiniteDistribution::new(vec![
            Atom::new(0.5, x(0.0), Label::ZERO),
            Atom::new(0.5, Instance::from_numeric(vec![0.0, 1.0]), Label::ZERO),
        ]);
        assert!(matches!(d, Err(Error::Schema { .. })));
    }

    #[test]
    fn perfect_and_constant_predictors() {
        let d = two_point(0.5);
        let perfect = FnPredictor(|i: &Instance| i.numeric[0]);
        assert_eq!(expected_loss(&perfect, &d, LossFunction::ZeroOne).unwrap(), 0.0);
        let zero = FnPredictor(|_: &Instance| 0.0);
        assert_eq!(expected_loss(&zero, &d, LossFunction::ZeroOne).unwrap(), 0.5);
    }

    #[test]
    fn empirical_loss_cases() {
        let zero = FnPredictor(|_: &Instance| 0.0);
        let s = Sample::new(
            vec![(x(0.0), Label::ZERO), (x(0.0), Label::ONE)],
            Provenance::default(),
        )
        .unwrap();
        assert_eq!(empirical_loss(&zero, &s, LossFunction::ZeroOne).unwrap(), 0.5);
        let ok = Sample::new(vec![(x(0.0), Label::ZERO); 7], Provenance::default()).unwrap();
        assert_eq!(empirical_loss(&zero, &ok, LossFunction::ZeroOne).unwrap(), 0.0);
        assert!(matches!(
            empirical_loss(&zero, &Sample::default(), LossFunction::ZeroOne),
            Err(Error::EmptySample)
        ));
    }

    #[test]
    fn draws_are_deterministic_and_concentrate() {
        let d = two_point(0.5);
        let a = draw_sample(&d, 100_000, 11).unwrap();
        let b = draw_sample(&d, 100_000, 11).unwrap();
        assert_eq!(a, b);
        let ones = a.iter().filter(|(_, y)| y.is_one()).count() as f64 / 1e5;
        assert!((ones - 0.5).abs() < 0.01, "{ones}");
        let counts = d.draw_counts(100_000, 11);
        assert_eq!(counts, d.draw_counts(100_000, 11));
        assert_eq!(counts.iter().sum::<usize>(), 100_000);
        assert!((counts[1] as f64 / 1e5 - 0.5).abs() < 0.01);
    }

    #[test]
    fn single_atom_sample_repeats() {
        let d = FiniteDistribution::dirac(x(3.0), Label::ONE);
        let s = draw_sample(&d, 5, 1).unwrap();
        assert!(s.iter().all(|p| *p == (x(3.0), Label::ONE)));
        assert!(draw_sample(&d, 0, 1).is_err());
    }

    #[test]
    fn total_variation_ignores_representation() {
        let a = two_point(0.25);
        let b = FiniteDistribution::new(vec![
            Atom::new(0.5, x(1.0), Label::ONE),
            Atom::new(0.25, x(0.0), Label::ZERO),
            Atom::new(0.25, x(1.0), Label::ONE),
        ])
        .unwrap();
        assert!(a.total_variation(&b) < 1e-15);
        assert!((a.total_variation(&two_point(0.75)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn posterior_per_instance() {
        let d = FiniteDistribution::new(vec![
            Atom::new(0.25, x(0.0), Label::ZERO),
            Atom::new(0.25, x(0.0), Label::ONE),
            Atom::new(0.5, x(1.0), Label::ONE),
        ])
        .unwrap();
        let post = d.posterior();
        assert_eq!(post.len(), 2);
        assert!((post[0].p_one() - 0.5).abs() < 1e-15);
        assert_eq!(post[1].p_one(), 1.0);
    }
}
