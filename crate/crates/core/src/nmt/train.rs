//! Mini-batch training with Adam, inverse-sqrt warmup and early stopping.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{Batch, Example, LossStats, Transformer};
use super::tensor::Float;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::subword::END_ID;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Sentences per optimizer step.
    pub batch_size: usize,
    /// Sentences per gradient work item; items are summed in order.
    pub chunk_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub label_smoothing: f64,
    pub peak_lr: f64,
    pub warmup_steps: usize,
    pub clip_norm: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_eps: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 64,
            chunk_size: 16,
            max_epochs: 30,
            patience: 5,
            label_smoothing: 0.1,
            peak_lr: 2e-3,
            warmup_steps: 400,
            clip_norm: 1.0,
            beta1: 0.9,
            beta2: 0.98,
            adam_eps: 1e-9,
            seed: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.chunk_size == 0 || self.max_epochs == 0 {
            return Err(Error::InvalidConfig("batch_size, chunk_size and max_epochs must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.label_smoothing) {
            return Err(Error::InvalidConfig(format!("label_smoothing {}", self.label_smoothing)));
        }
        Ok(())
    }

    /// peak · min(step / warmup, sqrt(warmup / step)), step counted from 1.
    pub fn learning_rate(&self, step: usize) -> f64 {
        let s = step.max(1) as f64;
        let w = self.warmup_steps.max(1) as f64;
        self.peak_lr * (s / w).min((w / s).sqrt())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Label-smoothed loss per target token.
    pub train_loss: f64,
    pub train_nll: f64,
    /// Dev NLL per target token, without dropout.
    pub dev_loss: Option<f64>,
    pub steps: usize,
    pub lr: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub stopped_epoch: usize,
    pub stopped_early: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Improved,
    Worse,
    Stop,
}

/// Stops once `patience` consecutive epochs fail to improve on the best
/// loss so far.
#[derive(Clone, Debug)]
pub struct EarlyStopping {
    pub patience: usize,
    best: f64,
    best_epoch: usize,
    bad: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        Self {
            patience,
            best: f64::INFINITY,
            best_epoch: 0,
            bad: 0,
        }
    }

    pub fn observe(&mut self, epoch: usize, loss: f64) -> Verdict {
        if loss < self.best {
            self.best = loss;
            self.best_epoch = epoch;
            self.bad = 0;
            Verdict::Improved
        } else {
            self.bad += 1;
            if self.bad >= self.patience {
                Verdict::Stop
            } else {
                Verdict::Worse
            }
        }
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }
}

/// Truncates an example to fit the model's positions, keeping the final
/// stop token on the target side.
pub fn fit_example(e: &Example, max_len: usize) -> Example {
    let mut src = e.src.clone();
    src.truncate(max_len);
    let mut tgt = e.tgt.clone();
    if tgt.last() != Some(&END_ID) {
        tgt.push(END_ID);
    }
    if tgt.len() > max_len {
        tgt.truncate(max_len);
        tgt[max_len - 1] = END_ID;
    }
    Example { src, tgt }
}

struct Adam<T> {
    m: Vec<T>,
    v: Vec<T>,
    t: i32,
}

impl<T: Float> Adam<T> {
    fn new(n: usize) -> Self {
        Self {
            m: vec![T::zero(); n],
            v: vec![T::zero(); n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [T], grads: &[T], lr: f64, c: &TrainConfig) {
        self.t += 1;
        let (b1, b2) = (T::of(c.beta1), T::of(c.beta2));
        let bc1 = 1.0 - c.beta1.powi(self.t);
        let bc2 = 1.0 - c.beta2.powi(self.t);
        let step = T::of(lr * bc2.sqrt() / bc1);
        let eps = T::of(c.adam_eps * bc2.sqrt());
        let one = T::one();
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = b1 * self.m[i] + (one - b1) * g;
            self.v[i] = b2 * self.v[i] + (one - b2) * g * g;
            params[i] -= step * self.m[i] / (self.v[i].sqrt() + eps);
        }
    }
}

/// Summed loss and gradient of `scale · loss` over `examples`, computed in
/// chunks that are added together in order.
pub fn batch_gradient<T: Float>(
    model: &Transformer<T>,
    examples: &[&Example],
    config: &TrainConfig,
    dropout_stream: Option<u64>,
    scale: T,
    exec: Exec,
) -> (LossStats, Vec<T>) {
    let chunks: Vec<&[&Example]> = examples.chunks(config.chunk_size).collect();
    let start = model.config.decoder_start;
    let parts = exec.map_indexed(chunks.len(), |i| {
        let batch = Batch::new(chunks[i], start);
        let rng = dropout_stream.map(|s| {
            let mut r = ChaCha8Rng::seed_from_u64(config.seed);
            r.set_stream(s * 1000 + i as u64);
            r
        });
        let mut g = vec![T::zero(); model.param_count()];
        let stats = model.loss(&batch, config.label_smoothing, scale, rng, Some(&mut g));
        (stats, g)
    });
    let mut total = LossStats::default();
    let mut grads = vec![T::zero(); model.param_count()];
    for (s, g) in parts {
        total.add(&s);
        grads.iter_mut().zip(&g).for_each(|(a, &b)| *a += b);
    }
    (total, grads)
}

/// Dev NLL per target token, without dropout.
pub fn evaluate_loss<T: Float>(model: &Transformer<T>, examples: &[Example], chunk: usize, exec: Exec) -> f64 {
    let refs: Vec<&Example> = examples.iter().collect();
    let chunks: Vec<&[&Example]> = refs.chunks(chunk.max(1)).collect();
    let start = model.config.decoder_start;
    let parts = exec.map(&chunks, |c| model.loss(&Batch::new(c, start), 0.0, T::one(), None, None));
    let mut total = LossStats::default();
    parts.iter().for_each(|s| total.add(s));
    if total.tokens == 0 {
        0.0
    } else {
        total.nll / total.tokens as f64
    }
}

/// Trains in place and leaves the best-dev parameters in `model` (the last
/// ones when `dev` is empty). `on_epoch` sees every record as it is made.
pub fn train<T: Float>(
    model: &mut Transformer<T>,
    train: &[Example],
    dev: &[Example],
    config: &TrainConfig,
    exec: Exec,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<History> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let max_len = model.config.max_seq_len;
    let train: Vec<Example> = train.iter().map(|e| fit_example(e, max_len)).collect();
    let dev: Vec<Example> = dev.iter().map(|e| fit_example(e, max_len)).collect();
    let mut adam = Adam::new(model.param_count());
    let mut stopper = EarlyStopping::new(config.patience.max(1));
    let mut best = model.params.clone();
    let mut history = History::default();
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut step = 0usize;

    for epoch in 1..=config.max_epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(epoch as u64);
        order.shuffle(&mut rng);
        let mut stats = LossStats::default();
        for batch_idx in order.chunks(config.batch_size) {
            step += 1;
            let examples: Vec<&Example> = batch_idx.iter().map(|&i| &train[i]).collect();
            let tokens: usize = examples.iter().map(|e| e.tgt.len()).sum();
            let scale = T::of(1.0 / tokens.max(1) as f64);
            let dropout = (model.config.dropout > 0.0).then_some(step as u64);
            let (s, mut grads) = batch_gradient(model, &examples, config, dropout, scale, exec);
            if !s.loss.is_finite() || grads.iter().any(|g| !g.is_finite()) {
                return Err(Error::DivergedLoss { epoch, step });
            }
            stats.add(&s);
            let norm = grads.iter().map(|g| g.f64() * g.f64()).sum::<f64>().sqrt();
            if config.clip_norm > 0.0 && norm > config.clip_norm {
                let c = T::of(config.clip_norm / norm);
                grads.iter_mut().for_each(|g| *g *= c);
            }
            adam.step(&mut model.params, &grads, config.learning_rate(step), config);
        }
        let dev_loss = (!dev.is_empty()).then(|| evaluate_loss(model, &dev, config.chunk_size, exec));
        let record = EpochRecord {
            epoch,
            train_loss: stats.loss / stats.tokens.max(1) as f64,
            train_nll: stats.nll / stats.tokens.max(1) as f64,
            dev_loss,
            steps: step,
            lr: config.learning_rate(step),
        };
        on_epoch(&record);
        history.epochs.push(record);
        history.stopped_epoch = epoch;
        match dev_loss {
            Some(l) => match stopper.observe(epoch, l) {
                Verdict::Improved => best.clone_from(&model.params),
                Verdict::Worse => {}
                Verdict::Stop => {
                    history.stopped_early = true;
                    break;
                }
            },
            None => {
                best.clone_from(&model.params);
                stopper.best_epoch = epoch;
            }
        }
    }
    history.best_epoch = stopper.best_epoch();
    model.params = best;
    Ok(history)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nmt::model::{DecoderStart, ModelConfig};

    #[test]
    fn early_stopping_counts_patience() {
        let mut s = EarlyStopping::new(5);
        let losses = [5.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        let stop = losses
            .iter()
            .enumerate()
            .find(|(i, &l)| s.observe(i + 1, l) == Verdict::Stop)
            .map(|(i, _)| i + 1);
        assert_eq!(stop, Some(7));
        assert_eq!(s.best_epoch(), 2);
    }

    #[test]
    fn schedule_peaks_at_warmup() {
        let c = TrainConfig::default();
        assert!((c.learning_rate(400) - 2e-3).abs() < 1e-15);
        assert!((c.learning_rate(200) - 1e-3).abs() < 1e-15);
        assert!((c.learning_rate(1600) - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn fit_keeps_stop_token() {
        let e = Example {
            src: (5..30).collect(),
            tgt: (20..40).collect(),
        };
        let f = fit_example(&e, 8);
        assert_eq!(f.src.len(), 8);
        assert_eq!(f.tgt.len(), 8);
        assert_eq!(*f.tgt.last().unwrap(), END_ID);
    }

    #[test]
    fn empty_training_set() {
        let mut m = Transformer::<f32>::new(ModelConfig::new(30)).unwrap();
        let r = train(&mut m, &[], &[], &TrainConfig::default(), Exec::Sequential, |_| {});
        assert!(matches!(r, Err(Error::EmptyTrainingSet)));
    }

    fn toy_pairs() -> Vec<Example> {
        (0..8u32)
            .map(|i| Example {
                src: vec![5 + i % 4, 9 + (i + 1) % 4, 13 + i, 14 + (i * 3) % 8, END_ID],
                tgt: vec![13 + (i * 5) % 8, 13 + i, END_ID],
            })
            .collect()
    }

    fn toy_config() -> ModelConfig {
        let mut c = ModelConfig::new(24);
        c.model_dim = 32;
        c.heads = 4;
        c.ffn_dim = 64;
        c.dropout = 0.1;
        c.max_seq_len = 16;
        c.decoder_start = DecoderStart::Bos;
        c
    }

    #[test]
    fn chunked_gradients_are_exec_independent() {
        let m = Transformer::<f32>::new(toy_config()).unwrap();
        let ex = toy_pairs();
        let refs: Vec<&Example> = ex.iter().collect();
        let c = TrainConfig {
            chunk_size: 3,
            ..TrainConfig::default()
        };
        let a = batch_gradient(&m, &refs, &c, Some(1), 0.1, Exec::Sequential);
        let b = batch_gradient(&m, &refs, &c, Some(1), 0.1, Exec::Parallel);
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn seeded_training_is_deterministic() {
        let ex = toy_pairs();
        let c = TrainConfig {
            batch_size: 4,
            chunk_size: 2,
            max_epochs: 3,
            warmup_steps: 4,
            ..TrainConfig::default()
        };
        let run = |exec| {
            let mut m = Transformer::<f32>::new(toy_config()).unwrap();
            let h = train(&mut m, &ex, &ex[..2], &c, exec, |_| {}).unwrap();
            (h, m.params)
        };
        let (h1, p1) = run(Exec::Sequential);
        let (h2, p2) = run(Exec::Parallel);
        assert_eq!(h1, h2);
        assert_eq!(p1, p2);
        assert_eq!(h1.epochs.len(), 3);
    }

    #[test]
    fn single_batch_memorizes() {
        let ex = toy_pairs();
        let mut mc = ModelConfig::new(24);
        mc.dropout = 0.0;
        let c = TrainConfig {
            batch_size: 8,
            chunk_size: 8,
            max_epochs: 200,
            label_smoothing: 0.0,
            warmup_steps: 20,
            ..TrainConfig::default()
        };
        let mut m = Transformer::<f32>::new(mc).unwrap();
        let h = train(&mut m, &ex, &[], &c, Exec::Sequential, |_| {}).unwrap();
        let last = h.epochs.last().unwrap();
        assert_eq!(h.stopped_epoch, 200);
        assert!(last.train_nll < 0.1, "{last:?}");
    }
}
