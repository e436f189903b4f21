//! The exemplar model and its randomized update rule.
//!
//! Each step consults one uniformly sampled member of the nearest set of the
//! new input. If that exemplar's stored output is more than `epsilon` from
//! the observed output the observation is appended (a miss). Otherwise (a
//! hit) the same sampled exemplar is removed with probability `1/q - 1` and
//! kept with probability `2 - 1/q`.
//!
//! Randomness per step is consumed in a fixed order: first the tie-break
//! draw(s) of [`sample_uniform`], then, on a hit only, one
//! [`RandomStream::next_f64`] for the removal coin. A step on an empty model
//! inserts unconditionally and draws nothing.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::index::{linear_nearest_set, IndexKind, NearestIndex, NearestSetIndex};
use crate::metric::Metric;
use crate::rng::RandomStream;

/// What a step does when the model has no exemplars to consult.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EmptyModelPolicy {
    /// Insert the observation, record an infinite output distance and a miss.
    #[default]
    ForcedInsert,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnerConfig {
    pub epsilon: f64,
    pub q: f64,
    pub tie_tolerance: f64,
    pub seed: u64,
    pub empty_model_policy: EmptyModelPolicy,
    pub(crate) removal_override: Option<f64>,
}

impl LearnerConfig {
    pub fn new(epsilon: f64, q: f64) -> Result<Self> {
        let config = Self {
            epsilon,
            q,
            tie_tolerance: 0.0,
            seed: 0,
            empty_model_policy: EmptyModelPolicy::ForcedInsert,
            removal_override: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_tie_tolerance(mut self, tie_tolerance: f64) -> Result<Self> {
        self.tie_tolerance = tie_tolerance;
        self.validate()?;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Replaces the removal probability with an arbitrary value. Only meant
    /// for mutation tests that check the verification suite notices a
    /// broken update rule.
    #[doc(hidden)]
    pub fn with_removal_probability_override(mut self, p: f64) -> Self {
        self.removal_override = Some(p);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig {
                key: "epsilon",
                reason: format!("epsilon must be positive, epsilon in (0, inf); got {}", self.epsilon),
            });
        }
        if !(0.5..1.0).contains(&self.q) {
            return Err(Error::InvalidConfig {
                key: "q",
                reason: format!("q must satisfy q in [1/2, 1); got {}", self.q),
            });
        }
        if !(self.tie_tolerance >= 0.0 && self.tie_tolerance.is_finite()) {
            return Err(Error::InvalidConfig {
                key: "tie_tolerance",
                reason: format!("must be a nonnegative finite number; got {}", self.tie_tolerance),
            });
        }
        Ok(())
    }

    /// `1/q - 1`, in `(0, 1]`.
    pub fn removal_probability(&self) -> f64 {
        self.removal_override.unwrap_or(1.0 / self.q - 1.0)
    }

    /// `2 - 1/q`, in `[0, 1)`.
    pub fn keep_probability(&self) -> f64 {
        2.0 - 1.0 / self.q
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Exemplar<X, Y> {
    pub input: X,
    pub output: Y,
}

/// The exemplar multiset, kept in insertion order.
#[derive(Clone, Debug, PartialEq)]
pub struct Model<X, Y> {
    exemplars: Vec<Exemplar<X, Y>>,
    insertion_counter: u64,
}

impl<X, Y> Default for Model<X, Y> {
    fn default() -> Self {
        Self {
            exemplars: Vec::new(),
            insertion_counter: 0,
        }
    }
}

impl<X, Y> Model<X, Y> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (X, Y)>) -> Self {
        let mut model = Self::new();
        for (input, output) in pairs {
            model.push(input, output);
        }
        model
    }

    pub fn len(&self) -> usize {
        self.exemplars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exemplars.is_empty()
    }

    pub fn exemplars(&self) -> &[Exemplar<X, Y>] {
        &self.exemplars
    }

    /// Total insertions ever made, including exemplars later removed.
    pub fn insertion_counter(&self) -> u64 {
        self.insertion_counter
    }

    pub fn push(&mut self, input: X, output: Y) {
        self.exemplars.push(Exemplar { input, output });
        self.insertion_counter += 1;
    }

    pub fn remove(&mut self, position: usize) -> Result<Exemplar<X, Y>> {
        if position >= self.exemplars.len() {
            return Err(Error::PositionOutOfRange {
                position,
                len: self.exemplars.len(),
            });
        }
        Ok(self.exemplars.remove(position))
    }

    pub fn inputs(&self) -> impl Iterator<Item = &X> {
        self.exemplars.iter().map(|e| &e.input)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Insert,
    Remove,
    Keep,
}

impl Action {
    pub fn size_delta(self) -> i8 {
        match self {
            Self::Insert => 1,
            Self::Remove => -1,
            Self::Keep => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Insert => "Insert",
            Self::Remove => "Remove",
            Self::Keep => "Keep",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Action {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "Insert" => Ok(Self::Insert),
            "Remove" => Ok(Self::Remove),
            "Keep" => Ok(Self::Keep),
            other => Err(format!("unknown action `{other}`")),
        }
    }
}

/// Full record of one step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    /// 1-based step number `n`.
    pub step_index: u64,
    /// Position of the consulted exemplar in the model before the step.
    pub sampled_index: Option<usize>,
    /// `+inf` when the model was empty.
    pub output_distance: f64,
    pub hit: bool,
    pub action: Action,
    pub model_size_after: usize,
    pub size_delta: i8,
}

/// Positions of the exemplars nearest to `x`, by full scan.
pub fn nearest_set<X, Y, M: Metric<X> + ?Sized>(
    x: &X,
    model: &Model<X, Y>,
    metric: &M,
    tie_tolerance: f64,
) -> Result<Vec<usize>> {
    linear_nearest_set(model.inputs(), x, metric, tie_tolerance)
}

/// A uniformly chosen element of `candidates`, via [`RandomStream::below`].
pub fn sample_uniform<'a, T>(candidates: &'a [T], rng: &mut RandomStream) -> Result<&'a T> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let i = rng.below(candidates.len() as u64) as usize;
    Ok(&candidates[i])
}

/// Output of a uniformly chosen nearest exemplar. Each call draws fresh
/// randomness.
pub fn predict<'m, X, Y, M: Metric<X> + ?Sized>(
    model: &'m Model<X, Y>,
    x: &X,
    metric: &M,
    config: &LearnerConfig,
    rng: &mut RandomStream,
) -> Result<&'m Y> {
    let candidates = nearest_set(x, model, metric, config.tie_tolerance)?;
    let &position = sample_uniform(&candidates, rng)?;
    Ok(&model.exemplars[position].output)
}

/// Resolves the action for a step whose hit test has been decided. On a hit
/// this draws the removal coin.
pub fn resolve_action(hit: bool, config: &LearnerConfig, rng: &mut RandomStream) -> Action {
    if !hit {
        Action::Insert
    } else if rng.bernoulli(config.removal_probability()) {
        Action::Remove
    } else {
        Action::Keep
    }
}

/// Applies one step given the nearest set of `x` (`None` iff the model is
/// empty). Returns the outcome; the caller mirrors it into any index.
#[allow(clippy::too_many_arguments)]
fn apply_step<X, Y, MY: Metric<Y> + ?Sized>(
    model: &mut Model<X, Y>,
    step_index: u64,
    x: X,
    y_true: Y,
    candidates: Option<Vec<usize>>,
    output_metric: &MY,
    config: &LearnerConfig,
    rng: &mut RandomStream,
) -> StepOutcome {
    let Some(candidates) = candidates else {
        match config.empty_model_policy {
            EmptyModelPolicy::ForcedInsert => {
                model.push(x, y_true);
                return StepOutcome {
                    step_index,
                    sampled_index: None,
                    output_distance: f64::INFINITY,
                    hit: false,
                    action: Action::Insert,
                    model_size_after: model.len(),
                    size_delta: 1,
                };
            }
        }
    };
    let &sampled = sample_uniform(&candidates, rng).expect("nearest set of a nonempty model");
    let d = output_metric.distance(&model.exemplars[sampled].output, &y_true);
    let hit = d <= config.epsilon;
    let action = resolve_action(hit, config, rng);
    match action {
        Action::Insert => model.push(x, y_true),
        Action::Remove => {
            model.exemplars.remove(sampled);
        }
        Action::Keep => {}
    }
    StepOutcome {
        step_index,
        sampled_index: Some(sampled),
        output_distance: d,
        hit,
        action,
        model_size_after: model.len(),
        size_delta: action.size_delta(),
    }
}

/// One update of `model` using a linear-scan nearest set. `step_index` is the
/// 1-based `n` recorded in the outcome.
#[allow(clippy::too_many_arguments)]
pub fn step<X, Y, MX: Metric<X> + ?Sized, MY: Metric<Y> + ?Sized>(
    model: &mut Model<X, Y>,
    step_index: u64,
    x: X,
    y_true: Y,
    input_metric: &MX,
    output_metric: &MY,
    config: &LearnerConfig,
    rng: &mut RandomStream,
) -> StepOutcome {
    let candidates = if model.is_empty() {
        None
    } else {
        Some(
            nearest_set(&x, model, input_metric, config.tie_tolerance)
                .expect("nonempty model"),
        )
    };
    apply_step(model, step_index, x, y_true, candidates, output_metric, config, rng)
}

/// Model plus a nearest-set index kept in lockstep with it.
#[derive(Clone, Debug)]
pub struct Learner<X, Y, MX, MY> {
    model: Model<X, Y>,
    index: NearestIndex<X, MX>,
    output_metric: MY,
    config: LearnerConfig,
    steps: u64,
}

impl<X, Y, MX, MY> Learner<X, Y, MX, MY>
where
    X: Clone,
    MX: Metric<X>,
    MY: Metric<Y>,
{
    pub fn new(input_metric: MX, output_metric: MY, config: LearnerConfig, index: IndexKind) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            model: Model::new(),
            index: NearestIndex::new(index, input_metric),
            output_metric,
            config,
            steps: 0,
        })
    }

    /// Starts from an existing model instead of the empty one.
    pub fn with_model(mut self, model: Model<X, Y>) -> Self {
        for x in model.inputs() {
            self.index.insert(x.clone());
        }
        self.model = model;
        self
    }

    pub fn model(&self) -> &Model<X, Y> {
        &self.model
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn index(&self) -> &NearestIndex<X, MX> {
        &self.index
    }

    /// Steps taken so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn nearest_set(&self, x: &X) -> Result<Vec<usize>> {
        self.index.nearest_set(x, self.config.tie_tolerance)
    }

    pub fn predict(&self, x: &X, rng: &mut RandomStream) -> Result<&Y> {
        let candidates = self.nearest_set(x)?;
        let &position = sample_uniform(&candidates, rng)?;
        Ok(&self.model.exemplars[position].output)
    }

    pub fn step(&mut self, x: X, y_true: Y, rng: &mut RandomStream) -> StepOutcome {
        self.steps += 1;
        let candidates = if self.model.is_empty() {
            None
        } else {
            Some(self.nearest_set(&x).expect("nonempty model"))
        };
        let x_copy = x.clone();
        let outcome = apply_step(
            &mut self.model,
            self.steps,
            x,
            y_true,
            candidates,
            &self.output_metric,
            &self.config,
            rng,
        );
        match outcome.action {
            Action::Insert => self.index.insert(x_copy),
            Action::Remove => self
                .index
                .remove(outcome.sampled_index.expect("remove follows a sample"))
                .expect("index in lockstep with model"),
            Action::Keep => {}
        }
        outcome
    }
}

/// Folds [`Learner::step`] over `stream` from the empty model, using the
/// learner sub-stream of `config.seed`.
pub fn run_stream<X, Y, MX, MY, I>(
    stream: I,
    input_metric: MX,
    output_metric: MY,
    config: LearnerConfig,
    index: IndexKind,
) -> Result<Vec<StepOutcome>>
where
    X: Clone,
    MX: Metric<X>,
    MY: Metric<Y>,
    I: IntoIterator<Item = (X, Y)>,
{
    let mut rng = RandomStream::substream(config.seed, crate::rng::LEARNER_STREAM);
    let mut learner = Learner::new(input_metric, output_metric, config, index)?;
    let outcomes: Vec<StepOutcome> = stream
        .into_iter()
        .map(|(x, y)| learner.step(x, y, &mut rng))
        .collect();
    if outcomes.is_empty() {
        return Err(Error::EmptyStream);
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{AbsoluteDifference, Discrete};

    fn real_model(pairs: &[(f64, f64)]) -> Model<f64, f64> {
        Model::from_pairs(pairs.iter().copied())
    }

    #[test]
    fn config_bounds() {
        assert!(LearnerConfig::new(0.1, 0.5).is_ok());
        assert!(LearnerConfig::new(0.1, 0.999).is_ok());
        assert!(matches!(
            LearnerConfig::new(0.1, 1.0),
            Err(Error::InvalidConfig { key: "q", .. })
        ));
        assert!(LearnerConfig::new(0.1, 0.49).is_err());
        assert!(LearnerConfig::new(0.1, f64::NAN).is_err());
        assert!(matches!(
            LearnerConfig::new(0.0, 0.9),
            Err(Error::InvalidConfig { key: "epsilon", .. })
        ));
        assert!(LearnerConfig::new(-1.0, 0.9).is_err());
        assert!(LearnerConfig::new(0.1, 0.9).unwrap().with_tie_tolerance(-0.1).is_err());
    }

    #[test]
    fn branch_probabilities_sum_to_one() {
        for q in [0.5, 0.6, 0.75, 0.9, 0.99] {
            let c = LearnerConfig::new(1.0, q).unwrap();
            let p = c.removal_probability();
            assert!(p > 0.0 && p <= 1.0);
            assert!((0.0..1.0).contains(&c.keep_probability()));
            assert!((p + c.keep_probability() - 1.0).abs() < 1e-15);
        }
        assert_eq!(LearnerConfig::new(1.0, 0.5).unwrap().removal_probability(), 1.0);
    }

    #[test]
    fn nearest_set_examples() {
        let m = real_model(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]);
        assert_eq!(nearest_set(&2.2, &m, &AbsoluteDifference, 0.0).unwrap(), vec![2]);
        let m = real_model(&[(0.0, 0.0), (2.0, 0.0)]);
        assert_eq!(nearest_set(&1.0, &m, &AbsoluteDifference, 0.0).unwrap(), vec![0, 1]);
        let m = real_model(&[(4.0, 0.0)]);
        assert_eq!(nearest_set(&-7.0, &m, &AbsoluteDifference, 0.0).unwrap(), vec![0]);
        let empty: Model<f64, f64> = Model::new();
        assert_eq!(nearest_set(&1.0, &empty, &AbsoluteDifference, 0.0), Err(Error::EmptyModel));
    }

    #[test]
    fn nearest_set_relative_tolerance() {
        let m = real_model(&[(0.0, 0.0), (2.05, 0.0), (3.0, 0.0)]);
        assert_eq!(nearest_set(&1.0, &m, &AbsoluteDifference, 0.0).unwrap(), vec![0]);
        assert_eq!(nearest_set(&1.0, &m, &AbsoluteDifference, 0.1).unwrap(), vec![0, 1]);
    }

    #[test]
    fn sample_uniform_singleton_one_draw() {
        let mut rng = RandomStream::new(9);
        assert_eq!(*sample_uniform(&['a'], &mut rng).unwrap(), 'a');
        assert_eq!(rng.draws(), 1);
        let empty: [char; 0] = [];
        assert_eq!(sample_uniform(&empty, &mut rng), Err(Error::EmptyCandidates));
    }

    #[test]
    fn sample_uniform_seed_42_pin() {
        let pick = |seed| *sample_uniform(&['a', 'b', 'c'], &mut RandomStream::new(seed)).unwrap();
        assert_eq!(pick(42), pick(42));
        assert_eq!(pick(42), 'c');
    }

    #[test]
    fn predict_examples() {
        let mut rng = RandomStream::new(1);
        let cfg = LearnerConfig::new(0.1, 0.9).unwrap();
        let m = real_model(&[(0.0, 7.0)]);
        assert_eq!(*predict(&m, &123.0, &AbsoluteDifference, &cfg, &mut rng).unwrap(), 7.0);
        let empty: Model<f64, f64> = Model::new();
        assert_eq!(predict(&empty, &0.0, &AbsoluteDifference, &cfg, &mut rng), Err(Error::EmptyModel));
    }

    #[test]
    fn miss_inserts() {
        let mut m = real_model(&[(0.0, 0.0)]);
        let cfg = LearnerConfig::new(0.5, 0.9).unwrap();
        let mut rng = RandomStream::new(0);
        let o = step(&mut m, 2, 1.0, 1.0, &AbsoluteDifference, &AbsoluteDifference, &cfg, &mut rng);
        assert_eq!(o.action, Action::Insert);
        assert!(!o.hit);
        assert_eq!(o.output_distance, 1.0);
        assert_eq!(o.model_size_after, 2);
        assert_eq!(m.exemplars()[1], Exemplar { input: 1.0, output: 1.0 });
        // A miss draws only the tie-break word.
        assert_eq!(rng.draws(), 1);
    }

    #[test]
    fn hit_at_half_removes_sampled() {
        let mut m = real_model(&[(0.0, 0.0), (5.0, 0.9)]);
        let cfg = LearnerConfig::new(0.5, 0.5).unwrap();
        let mut rng = RandomStream::new(0);
        let o = step(&mut m, 3, 0.1, 0.05, &AbsoluteDifference, &AbsoluteDifference, &cfg, &mut rng);
        assert_eq!(o.action, Action::Remove);
        assert_eq!(o.sampled_index, Some(0));
        assert_eq!(o.output_distance, 0.05);
        assert_eq!(o.model_size_after, 1);
        assert_eq!(m.exemplars(), &[Exemplar { input: 5.0, output: 0.9 }]);
        assert_eq!(rng.draws(), 2);
    }

    #[test]
    fn empty_model_forced_insert_draws_nothing() {
        let mut m: Model<f64, f64> = Model::new();
        let cfg = LearnerConfig::new(0.5, 0.9).unwrap();
        let mut rng = RandomStream::new(0);
        let o = step(&mut m, 1, 1.0, 2.0, &AbsoluteDifference, &AbsoluteDifference, &cfg, &mut rng);
        assert_eq!(o.action, Action::Insert);
        assert_eq!(o.output_distance, f64::INFINITY);
        assert_eq!(o.sampled_index, None);
        assert!(!o.hit);
        assert_eq!(rng.draws(), 0);
    }

    #[test]
    fn removal_hits_the_consulted_exemplar_under_ties() {
        // Two exemplars tie for the query; their outputs differ so that only
        // one of them is a hit. Whenever a removal happens it must be the hit one.
        let cfg = LearnerConfig::new(0.5, 0.5).unwrap();
        for seed in 0..200 {
            let mut m = Model::from_pairs([(0.0, "a"), (2.0, "b")]);
            let mut rng = RandomStream::new(seed);
            let o = step(&mut m, 1, 1.0, "a", &AbsoluteDifference, &Discrete, &cfg, &mut rng);
            match o.action {
                Action::Remove => {
                    assert_eq!(o.sampled_index, Some(0));
                    assert_eq!(m.exemplars()[0].output, "b");
                }
                Action::Insert => assert_eq!(o.sampled_index, Some(1)),
                Action::Keep => unreachable!("q = 0.5 never keeps"),
            }
        }
    }

    #[test]
    fn run_stream_one_element() {
        let cfg = LearnerConfig::new(0.5, 0.9).unwrap();
        let out = run_stream([(0.0, 0.0)], AbsoluteDifference, AbsoluteDifference, cfg, IndexKind::LinearScan)
            .unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].action, Action::Insert);
        assert_eq!(out[0].model_size_after, 1);
        assert_eq!(out[0].step_index, 1);
    }

    #[test]
    fn run_stream_empty() {
        let cfg = LearnerConfig::new(0.5, 0.9).unwrap();
        let out = run_stream(
            Vec::<(f64, f64)>::new(),
            AbsoluteDifference,
            AbsoluteDifference,
            cfg,
            IndexKind::LinearScan,
        );
        assert_eq!(out, Err(Error::EmptyStream));
    }

    #[test]
    fn run_stream_large_epsilon_at_half_alternates() {
        // Every nonempty step hits and removes with certainty; every empty
        // step force-inserts.
        let cfg = LearnerConfig::new(10.0, 0.5).unwrap();
        let stream = [(0.1, 0.3), (0.7, -0.2), (0.4, 0.9), (0.9, 0.0), (0.2, 0.5)];
        let out = run_stream(stream, AbsoluteDifference, AbsoluteDifference, cfg, IndexKind::VpTree { leaf_capacity: 4 })
            .unwrap();
        let actions: Vec<Action> = out.iter().map(|o| o.action).collect();
        let sizes: Vec<usize> = out.iter().map(|o| o.model_size_after).collect();
        use Action::*;
        assert_eq!(actions, vec![Insert, Remove, Insert, Remove, Insert]);
        assert_eq!(sizes, vec![1, 0, 1, 0, 1]);
    }

    #[test]
    fn learner_matches_free_step() {
        let cfg = LearnerConfig::new(0.3, 0.7).unwrap().with_seed(5);
        let mut learner = Learner::new(AbsoluteDifference, AbsoluteDifference, cfg.clone(), IndexKind::default()).unwrap();
        let mut model = Model::new();
        let mut r1 = RandomStream::new(5);
        let mut r2 = RandomStream::new(5);
        for n in 1..=2000u64 {
            let x = ((n * 7919) % 1000) as f64 / 100.0;
            let y = x.sin();
            let a = learner.step(x, y, &mut r1);
            let b = step(&mut model, n, x, y, &AbsoluteDifference, &AbsoluteDifference, &cfg, &mut r2);
            assert_eq!(a, b);
        }
        assert_eq!(learner.model(), &model);
    }
}
