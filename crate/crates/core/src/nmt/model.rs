//! Pre-norm encoder-decoder transformer over a flat parameter buffer, with
//! hand-written backward passes.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tensor::{gemm, Float, View};
use crate::error::{Error, Result};
use crate::subword::{BOS_ID, PAD_ID};

const LN_EPS: f64 = 1e-5;

/// First decoder input token.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderStart {
    #[default]
    Bos,
    /// The target-language tag taken from the source line.
    TargetTag,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub layers_enc: usize,
    pub layers_dec: usize,
    pub model_dim: usize,
    pub heads: usize,
    pub ffn_dim: usize,
    pub dropout: f64,
    pub max_seq_len: usize,
    pub vocab_size: usize,
    pub seed: u64,
    pub tied_embeddings: bool,
    #[serde(default)]
    pub decoder_start: DecoderStart,
}

impl ModelConfig {
    pub fn new(vocab_size: usize) -> Self {
        Self {
            layers_enc: 2,
            layers_dec: 2,
            model_dim: 64,
            heads: 4,
            ffn_dim: 256,
            dropout: 0.1,
            max_seq_len: 64,
            vocab_size,
            seed: 1,
            tied_embeddings: false,
            decoder_start: DecoderStart::Bos,
        }
    }

    pub fn head_dim(&self) -> usize {
        self.model_dim / self.heads.max(1)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.heads == 0 || self.model_dim == 0 || self.model_dim % self.heads != 0 {
            return bad(format!(
                "model_dim {} is not divisible by heads {}",
                self.model_dim, self.heads
            ));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad(format!("dropout {} outside [0, 1)", self.dropout));
        }
        if self.vocab_size == 0 || self.ffn_dim == 0 || self.max_seq_len == 0 {
            return bad("vocab_size, ffn_dim and max_seq_len must be positive".into());
        }
        if self.model_dim % 2 != 0 {
            return bad("model_dim must be even for sinusoidal positions".into());
        }
        Ok(())
    }
}

/// One training pair as token ids. `src` starts with the two tags; `tgt`
/// ends with its stop token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Example {
    pub src: Vec<u32>,
    pub tgt: Vec<u32>,
}

/// Right-padded sentences, row-major `size × len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Batch {
    pub size: usize,
    pub src_len: usize,
    pub tgt_len: usize,
    pub src: Vec<u32>,
    pub src_lens: Vec<usize>,
    pub tgt_in: Vec<u32>,
    pub tgt_out: Vec<u32>,
    pub tgt_lens: Vec<usize>,
}

impl Batch {
    pub fn new(examples: &[&Example], start: DecoderStart) -> Self {
        let size = examples.len();
        let src_len = examples.iter().map(|e| e.src.len()).max().unwrap_or(0);
        let tgt_len = examples.iter().map(|e| e.tgt.len()).max().unwrap_or(0);
        let mut b = Batch {
            size,
            src_len,
            tgt_len,
            src: vec![PAD_ID; size * src_len],
            src_lens: Vec::with_capacity(size),
            tgt_in: vec![PAD_ID; size * tgt_len],
            tgt_out: vec![PAD_ID; size * tgt_len],
            tgt_lens: Vec::with_capacity(size),
        };
        for (i, e) in examples.iter().enumerate() {
            b.src[i * src_len..i * src_len + e.src.len()].copy_from_slice(&e.src);
            b.src_lens.push(e.src.len());
            let row = i * tgt_len;
            if !e.tgt.is_empty() {
                b.tgt_in[row] = start_id(start, &e.src);
                b.tgt_in[row + 1..row + e.tgt.len()].copy_from_slice(&e.tgt[..e.tgt.len() - 1]);
                b.tgt_out[row..row + e.tgt.len()].copy_from_slice(&e.tgt);
            }
            b.tgt_lens.push(e.tgt.len());
        }
        b
    }

    /// True exactly at source pad positions.
    pub fn src_pad_mask(&self) -> Vec<bool> {
        pad_mask(self.size, self.src_len, &self.src_lens)
    }

    pub fn tgt_pad_mask(&self) -> Vec<bool> {
        pad_mask(self.size, self.tgt_len, &self.tgt_lens)
    }

    pub fn target_tokens(&self) -> usize {
        self.tgt_lens.iter().sum()
    }
}

fn pad_mask(size: usize, len: usize, lens: &[usize]) -> Vec<bool> {
    (0..size * len).map(|r| r % len >= lens[r / len]).collect()
}

pub(crate) fn start_id(start: DecoderStart, src: &[u32]) -> u32 {
    match start {
        DecoderStart::Bos => BOS_ID,
        DecoderStart::TargetTag => src.get(1).copied().unwrap_or(BOS_ID),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub name: String,
    pub shape: Vec<usize>,
    pub offset: usize,
}

impl Slot {
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.len()
    }
}

#[derive(Clone, Copy)]
enum Init {
    Zero,
    One,
    Uniform(f64),
}

#[derive(Default)]
struct Builder {
    slots: Vec<Slot>,
    inits: Vec<Init>,
    len: usize,
}

impl Builder {
    fn add(&mut self, name: String, shape: &[usize], init: Init) -> Range<usize> {
        let slot = Slot {
            name,
            shape: shape.to_vec(),
            offset: self.len,
        };
        self.len += slot.len();
        let r = slot.range();
        self.slots.push(slot);
        self.inits.push(init);
        r
    }

    fn lin(&mut self, name: &str, din: usize, dout: usize) -> Lin {
        let a = (6.0 / (din + dout) as f64).sqrt();
        Lin {
            w: self.add(format!("{name}.w"), &[din, dout], Init::Uniform(a)),
            b: self.add(format!("{name}.b"), &[dout], Init::Zero),
            din,
            dout,
        }
    }

    fn norm(&mut self, name: &str, d: usize) -> Norm {
        Norm {
            g: self.add(format!("{name}.g"), &[d], Init::One),
            b: self.add(format!("{name}.b"), &[d], Init::Zero),
        }
    }

    fn attn(&mut self, name: &str, d: usize) -> Attn {
        Attn {
            q: self.lin(&format!("{name}.q"), d, d),
            k: self.lin(&format!("{name}.k"), d, d),
            v: self.lin(&format!("{name}.v"), d, d),
            o: self.lin(&format!("{name}.o"), d, d),
        }
    }

    fn ffn(&mut self, name: &str, d: usize, f: usize) -> Ffn {
        Ffn {
            up: self.lin(&format!("{name}.up"), d, f),
            down: self.lin(&format!("{name}.down"), f, d),
        }
    }
}

#[derive(Clone, Debug)]
struct Lin {
    w: Range<usize>,
    b: Range<usize>,
    din: usize,
    dout: usize,
}

#[derive(Clone, Debug)]
struct Norm {
    g: Range<usize>,
    b: Range<usize>,
}

#[derive(Clone, Debug)]
struct Attn {
    q: Lin,
    k: Lin,
    v: Lin,
    o: Lin,
}

#[derive(Clone, Debug)]
struct Ffn {
    up: Lin,
    down: Lin,
}

#[derive(Clone, Debug)]
struct EncLayer {
    n1: Norm,
    att: Attn,
    n2: Norm,
    ffn: Ffn,
}

#[derive(Clone, Debug)]
struct DecLayer {
    n1: Norm,
    att: Attn,
    n2: Norm,
    cross: Attn,
    n3: Norm,
    ffn: Ffn,
}

#[derive(Clone, Debug)]
struct Net {
    embed: Range<usize>,
    out_w: Option<Range<usize>>,
    out_b: Range<usize>,
    enc: Vec<EncLayer>,
    enc_norm: Norm,
    dec: Vec<DecLayer>,
    dec_norm: Norm,
}

struct NormCache<T> {
    xhat: Vec<T>,
    rstd: Vec<T>,
}

struct AttnCache<T> {
    xq: Vec<T>,
    xkv: Option<Vec<T>>,
    q: Vec<T>,
    k: Vec<T>,
    v: Vec<T>,
    probs: Vec<T>,
    ctx: Vec<T>,
}

struct FfnCache<T> {
    x: Vec<T>,
    h: Vec<T>,
}

struct EncCache<T> {
    n1: NormCache<T>,
    att: AttnCache<T>,
    m1: Vec<T>,
    n2: NormCache<T>,
    ffn: FfnCache<T>,
    m2: Vec<T>,
}

struct DecCache<T> {
    n1: NormCache<T>,
    att: AttnCache<T>,
    m1: Vec<T>,
    n2: NormCache<T>,
    cross: AttnCache<T>,
    m2: Vec<T>,
    n3: NormCache<T>,
    ffn: FfnCache<T>,
    m3: Vec<T>,
}

struct EncStack<T> {
    layers: Vec<EncCache<T>>,
    norm: NormCache<T>,
}

struct DecStack<T> {
    layers: Vec<DecCache<T>>,
    norm: NormCache<T>,
}

#[derive(Clone, Copy)]
struct Shape<'a> {
    b: usize,
    lq: usize,
    lk: usize,
    key_lens: &'a [usize],
    causal: bool,
}

/// Summed (not averaged) loss statistics over the target tokens of a batch.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LossStats {
    /// Label-smoothed cross-entropy.
    pub loss: f64,
    pub nll: f64,
    pub tokens: usize,
}

impl LossStats {
    pub fn add(&mut self, o: &LossStats) {
        self.loss += o.loss;
        self.nll += o.nll;
        self.tokens += o.tokens;
    }
}

/// Attention probabilities of one attention block, `b × heads × lq × lk`.
#[derive(Clone, Debug, PartialEq)]
pub struct AttentionMap {
    pub kind: &'static str,
    pub layer: usize,
    pub heads: usize,
    pub lq: usize,
    pub lk: usize,
    pub probs: Vec<f64>,
}

#[cfg(test)]
thread_local! {
    /// Drops the softmax Jacobian's row term in attention backward.
    pub(crate) static CORRUPT_ATTENTION_GRAD: std::cell::Cell<bool> = const { std::cell::Cell::new(false) };
}

fn attention_fault() -> bool {
    #[cfg(test)]
    {
        CORRUPT_ATTENTION_GRAD.with(|c| c.get())
    }
    #[cfg(not(test))]
    {
        false
    }
}

fn dropout<T: Float>(x: &mut [T], p: f64, rng: &mut Option<ChaCha8Rng>) -> Vec<T> {
    match rng {
        Some(r) if p > 0.0 => {
            let keep = T::of(1.0 / (1.0 - p));
            let mask: Vec<T> = (0..x.len())
                .map(|_| if r.gen::<f64>() < p { T::zero() } else { keep })
                .collect();
            x.iter_mut().zip(&mask).for_each(|(a, &m)| *a *= m);
            mask
        }
        _ => Vec::new(),
    }
}

fn masked<T: Float>(dy: &[T], mask: &[T]) -> Vec<T> {
    if mask.is_empty() {
        dy.to_vec()
    } else {
        dy.iter().zip(mask).map(|(&a, &m)| a * m).collect()
    }
}

fn add_into<T: Float>(acc: &mut [T], x: &[T]) {
    acc.iter_mut().zip(x).for_each(|(a, &b)| *a += b);
}

pub struct Transformer<T: Float> {
    pub config: ModelConfig,
    slots: Vec<Slot>,
    net: Net,
    pub params: Vec<T>,
    pe: Vec<T>,
}

impl<T: Float> Clone for Transformer<T> {
    fn clone(&self) -> Self {
        Self {
            config: self.config.clone(),
            slots: self.slots.clone(),
            net: self.net.clone(),
            params: self.params.clone(),
            pe: self.pe.clone(),
        }
    }
}

impl<T: Float> Transformer<T> {
    /// Builds the parameter layout and draws the initial weights from the
    /// configured seed.
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let (d, v, f) = (config.model_dim, config.vocab_size, config.ffn_dim);
        let mut bld = Builder::default();
        let emb_a = 3f64.sqrt() / (d as f64).sqrt();
        let embed = bld.add("embed".into(), &[v, d], Init::Uniform(emb_a));
        let out_a = 3f64.sqrt() / d as f64;
        let out_w = (!config.tied_embeddings).then(|| bld.add("out.w".into(), &[v, d], Init::Uniform(out_a)));
        let out_b = bld.add("out.b".into(), &[v], Init::Zero);
        let enc = (0..config.layers_enc)
            .map(|i| EncLayer {
                n1: bld.norm(&format!("enc{i}.n1"), d),
                att: bld.attn(&format!("enc{i}.att"), d),
                n2: bld.norm(&format!("enc{i}.n2"), d),
                ffn: bld.ffn(&format!("enc{i}.ffn"), d, f),
            })
            .collect();
        let enc_norm = bld.norm("enc.norm", d);
        let dec = (0..config.layers_dec)
            .map(|i| DecLayer {
                n1: bld.norm(&format!("dec{i}.n1"), d),
                att: bld.attn(&format!("dec{i}.att"), d),
                n2: bld.norm(&format!("dec{i}.n2"), d),
                cross: bld.attn(&format!("dec{i}.cross"), d),
                n3: bld.norm(&format!("dec{i}.n3"), d),
                ffn: bld.ffn(&format!("dec{i}.ffn"), d, f),
            })
            .collect();
        let dec_norm = bld.norm("dec.norm", d);

        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut params = vec![T::zero(); bld.len];
        for (slot, init) in bld.slots.iter().zip(&bld.inits) {
            for x in &mut params[slot.range()] {
                *x = match *init {
                    Init::Zero => T::zero(),
                    Init::One => T::one(),
                    Init::Uniform(a) => T::of(rng.gen_range(-a..a)),
                };
            }
        }
        let mut pe = vec![T::zero(); config.max_seq_len * d];
        for pos in 0..config.max_seq_len {
            for i in (0..d).step_by(2) {
                let angle = pos as f64 / 10000f64.powf(i as f64 / d as f64);
                pe[pos * d + i] = T::of(angle.sin());
                pe[pos * d + i + 1] = T::of(angle.cos());
            }
        }
        Ok(Self {
            config,
            slots: bld.slots,
            net: Net {
                embed,
                out_w,
                out_b,
                enc,
                enc_norm,
                dec,
                dec_norm,
            },
            params,
            pe,
        })
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn start_id(&self, src: &[u32]) -> u32 {
        start_id(self.config.decoder_start, src)
    }

    fn d(&self) -> usize {
        self.config.model_dim
    }

    fn lin(&self, l: &Lin, x: &[T], rows: usize) -> Vec<T> {
        let p = &self.params;
        let mut y = Vec::with_capacity(rows * l.dout);
        for _ in 0..rows {
            y.extend_from_slice(&p[l.b.clone()]);
        }
        gemm(
            T::one(),
            x,
            View::mat(0, rows, l.din),
            p,
            View::mat(l.w.start, l.din, l.dout),
            T::one(),
            &mut y,
            View::mat(0, rows, l.dout),
        );
        y
    }

    fn lin_bwd(&self, l: &Lin, x: &[T], dy: &[T], rows: usize, g: &mut [T]) -> Vec<T> {
        let p = &self.params;
        gemm(
            T::one(),
            x,
            View::mat(0, rows, l.din).t(),
            dy,
            View::mat(0, rows, l.dout),
            T::one(),
            g,
            View::mat(l.w.start, l.din, l.dout),
        );
        let gb = &mut g[l.b.clone()];
        for row in dy.chunks_exact(l.dout) {
            add_into(gb, row);
        }
        let mut dx = vec![T::zero(); rows * l.din];
        gemm(
            T::one(),
            dy,
            View::mat(0, rows, l.dout),
            p,
            View::mat(l.w.start, l.din, l.dout).t(),
            T::zero(),
            &mut dx,
            View::mat(0, rows, l.din),
        );
        dx
    }

    fn norm(&self, n: &Norm, x: &[T]) -> (Vec<T>, NormCache<T>) {
        let d = self.d();
        let (g, b) = (&self.params[n.g.clone()], &self.params[n.b.clone()]);
        let rows = x.len() / d;
        let mut y = vec![T::zero(); x.len()];
        let mut xhat = vec![T::zero(); x.len()];
        let mut rstd = Vec::with_capacity(rows);
        let dn = T::of(d as f64);
        for r in 0..rows {
            let row = &x[r * d..(r + 1) * d];
            let mean = row.iter().copied().sum::<T>() / dn;
            let var = row.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / dn;
            let rs = T::one() / (var + T::of(LN_EPS)).sqrt();
            for j in 0..d {
                let h = (row[j] - mean) * rs;
                xhat[r * d + j] = h;
                y[r * d + j] = h * g[j] + b[j];
            }
            rstd.push(rs);
        }
        (y, NormCache { xhat, rstd })
    }

    fn norm_bwd(&self, n: &Norm, c: &NormCache<T>, dy: &[T], gr: &mut [T]) -> Vec<T> {
        let d = self.d();
        let g = &self.params[n.g.clone()];
        let mut dx = vec![T::zero(); dy.len()];
        let dn = T::of(d as f64);
        let mut dxhat = vec![T::zero(); d];
        for (r, &rs) in c.rstd.iter().enumerate() {
            let (dyr, xh) = (&dy[r * d..(r + 1) * d], &c.xhat[r * d..(r + 1) * d]);
            for j in 0..d {
                gr[n.g.start + j] += dyr[j] * xh[j];
                gr[n.b.start + j] += dyr[j];
                dxhat[j] = dyr[j] * g[j];
            }
            let m1 = dxhat.iter().copied().sum::<T>() / dn;
            let m2 = dxhat.iter().zip(xh).map(|(&a, &b)| a * b).sum::<T>() / dn;
            for j in 0..d {
                dx[r * d + j] = rs * (dxhat[j] - m1 - xh[j] * m2);
            }
        }
        dx
    }

    fn attn(&self, a: &Attn, xq: Vec<T>, xkv: Option<Vec<T>>, s: Shape) -> (Vec<T>, AttnCache<T>) {
        let (d, h) = (self.d(), self.config.heads);
        let dk = d / h;
        let q = self.lin(&a.q, &xq, s.b * s.lq);
        let kv_in = xkv.as_deref().unwrap_or(&xq);
        let k = self.lin(&a.k, kv_in, s.b * s.lk);
        let v = self.lin(&a.v, kv_in, s.b * s.lk);
        let scale = T::of(1.0 / (dk as f64).sqrt());
        let mut probs = vec![T::zero(); s.b * h * s.lq * s.lk];
        let mut ctx = vec![T::zero(); s.b * s.lq * d];
        for bi in 0..s.b {
            for hi in 0..h {
                let poff = (bi * h + hi) * s.lq * s.lk;
                let qv = View::block(bi * s.lq * d + hi * dk, s.lq, dk, d);
                let kv = View::block(bi * s.lk * d + hi * dk, s.lk, dk, d);
                let pv = View::mat(poff, s.lq, s.lk);
                gemm(scale, &q, qv, &k, kv.t(), T::zero(), &mut probs, pv);
                for i in 0..s.lq {
                    let allowed = if s.causal { (i + 1).min(s.key_lens[bi]) } else { s.key_lens[bi] };
                    let row = &mut probs[poff + i * s.lk..poff + (i + 1) * s.lk];
                    let max = row[..allowed].iter().copied().fold(T::neg_infinity(), T::max);
                    let mut z = T::zero();
                    for x in &mut row[..allowed] {
                        *x = (*x - max).exp();
                        z += *x;
                    }
                    for x in &mut row[..allowed] {
                        *x /= z;
                    }
                    row[allowed..].iter_mut().for_each(|x| *x = T::zero());
                }
                gemm(T::one(), &probs, pv, &v, kv, T::zero(), &mut ctx, qv);
            }
        }
        let out = self.lin(&a.o, &ctx, s.b * s.lq);
        (
            out,
            AttnCache {
                xq,
                xkv,
                q,
                k,
                v,
                probs,
                ctx,
            },
        )
    }

    fn attn_bwd(&self, a: &Attn, c: &AttnCache<T>, dout: &[T], s: Shape, g: &mut [T]) -> (Vec<T>, Option<Vec<T>>) {
        let (d, h) = (self.d(), self.config.heads);
        let dk = d / h;
        let scale = T::of(1.0 / (dk as f64).sqrt());
        let fault = attention_fault();
        let dctx = self.lin_bwd(&a.o, &c.ctx, dout, s.b * s.lq, g);
        let mut dq = vec![T::zero(); s.b * s.lq * d];
        let mut dkk = vec![T::zero(); s.b * s.lk * d];
        let mut dv = vec![T::zero(); s.b * s.lk * d];
        let mut dp = vec![T::zero(); s.lq * s.lk];
        for bi in 0..s.b {
            for hi in 0..h {
                let poff = (bi * h + hi) * s.lq * s.lk;
                let qv = View::block(bi * s.lq * d + hi * dk, s.lq, dk, d);
                let kv = View::block(bi * s.lk * d + hi * dk, s.lk, dk, d);
                let pv = View::mat(poff, s.lq, s.lk);
                let local = View::mat(0, s.lq, s.lk);
                gemm(T::one(), &dctx, qv, &c.v, kv.t(), T::zero(), &mut dp, local);
                gemm(T::one(), &c.probs, pv.t(), &dctx, qv, T::zero(), &mut dv, kv);
                for i in 0..s.lq {
                    let p = &c.probs[poff + i * s.lk..poff + (i + 1) * s.lk];
                    let row = &mut dp[i * s.lk..(i + 1) * s.lk];
                    let dot = if fault {
                        T::zero()
                    } else {
                        p.iter().zip(row.iter()).map(|(&a, &b)| a * b).sum::<T>()
                    };
                    for (x, &pj) in row.iter_mut().zip(p) {
                        *x = pj * (*x - dot) * scale;
                    }
                }
                gemm(T::one(), &dp, local, &c.k, kv, T::zero(), &mut dq, qv);
                gemm(T::one(), &dp, local.t(), &c.q, qv, T::zero(), &mut dkk, kv);
            }
        }
        let kv_in = c.xkv.as_deref().unwrap_or(&c.xq);
        let mut dxq = self.lin_bwd(&a.q, &c.xq, &dq, s.b * s.lq, g);
        let mut dkv = self.lin_bwd(&a.k, kv_in, &dkk, s.b * s.lk, g);
        add_into(&mut dkv, &self.lin_bwd(&a.v, kv_in, &dv, s.b * s.lk, g));
        if c.xkv.is_none() {
            add_into(&mut dxq, &dkv);
            (dxq, None)
        } else {
            (dxq, Some(dkv))
        }
    }

    fn ffn(&self, f: &Ffn, x: Vec<T>) -> (Vec<T>, FfnCache<T>) {
        let rows = x.len() / self.d();
        let mut h = self.lin(&f.up, &x, rows);
        h.iter_mut().for_each(|v| *v = v.max(T::zero()));
        let y = self.lin(&f.down, &h, rows);
        (y, FfnCache { x, h })
    }

    fn ffn_bwd(&self, f: &Ffn, c: &FfnCache<T>, dy: &[T], g: &mut [T]) -> Vec<T> {
        let rows = c.x.len() / self.d();
        let mut dh = self.lin_bwd(&f.down, &c.h, dy, rows, g);
        dh.iter_mut().zip(&c.h).for_each(|(d, &h)| {
            if h <= T::zero() {
                *d = T::zero()
            }
        });
        self.lin_bwd(&f.up, &c.x, &dh, rows, g)
    }

    fn embed(&self, ids: &[u32], len: usize) -> Vec<T> {
        let d = self.d();
        let scale = T::of((d as f64).sqrt());
        let e = &self.params[self.net.embed.clone()];
        let mut x = vec![T::zero(); ids.len() * d];
        for (r, &id) in ids.iter().enumerate() {
            let pos = (r % len).min(self.config.max_seq_len - 1);
            let (src, pe) = (&e[id as usize * d..(id as usize + 1) * d], &self.pe[pos * d..(pos + 1) * d]);
            for j in 0..d {
                x[r * d + j] = src[j] * scale + pe[j];
            }
        }
        x
    }

    fn embed_bwd(&self, ids: &[u32], dx: &[T], g: &mut [T]) {
        let d = self.d();
        let scale = T::of((d as f64).sqrt());
        let base = self.net.embed.start;
        for (r, &id) in ids.iter().enumerate() {
            let dst = &mut g[base + id as usize * d..base + (id as usize + 1) * d];
            for j in 0..d {
                dst[j] += dx[r * d + j] * scale;
            }
        }
    }

    fn encode_fwd(&self, src: &[u32], b: usize, ls: usize, lens: &[usize], rng: &mut Option<ChaCha8Rng>) -> (Vec<T>, EncStack<T>) {
        let p = self.config.dropout;
        let mut x = self.embed(src, ls);
        dropout(&mut x, p, rng);
        let shape = Shape {
            b,
            lq: ls,
            lk: ls,
            key_lens: lens,
            causal: false,
        };
        let mut layers = Vec::with_capacity(self.net.enc.len());
        for l in &self.net.enc {
            let (ln1, n1) = self.norm(&l.n1, &x);
            let (mut a, att) = self.attn(&l.att, ln1, None, shape);
            let m1 = dropout(&mut a, p, rng);
            add_into(&mut x, &a);
            let (ln2, n2) = self.norm(&l.n2, &x);
            let (mut f, ffn) = self.ffn(&l.ffn, ln2);
            let m2 = dropout(&mut f, p, rng);
            add_into(&mut x, &f);
            layers.push(EncCache { n1, att, m1, n2, ffn, m2 });
        }
        let (mem, norm) = self.norm(&self.net.enc_norm, &x);
        (mem, EncStack { layers, norm })
    }

    fn encode_bwd(&self, c: &EncStack<T>, dmem: &[T], shape: Shape, g: &mut [T]) -> Vec<T> {
        let mut dx = self.norm_bwd(&self.net.enc_norm, &c.norm, dmem, g);
        for (l, lc) in self.net.enc.iter().zip(&c.layers).rev() {
            let df = masked(&dx, &lc.m2);
            let dln2 = self.ffn_bwd(&l.ffn, &lc.ffn, &df, g);
            add_into(&mut dx, &self.norm_bwd(&l.n2, &lc.n2, &dln2, g));
            let da = masked(&dx, &lc.m1);
            let (dln1, _) = self.attn_bwd(&l.att, &lc.att, &da, shape, g);
            add_into(&mut dx, &self.norm_bwd(&l.n1, &lc.n1, &dln1, g));
        }
        masked(&dx, &[])
    }

    #[allow(clippy::too_many_arguments)]
    fn decode_fwd(
        &self,
        tgt_in: &[u32],
        b: usize,
        lt: usize,
        tgt_lens: &[usize],
        memory: &[T],
        ls: usize,
        src_lens: &[usize],
        rng: &mut Option<ChaCha8Rng>,
    ) -> (Vec<T>, DecStack<T>) {
        let p = self.config.dropout;
        let mut y = self.embed(tgt_in, lt);
        dropout(&mut y, p, rng);
        let self_shape = Shape {
            b,
            lq: lt,
            lk: lt,
            key_lens: tgt_lens,
            causal: true,
        };
        let cross_shape = Shape {
            b,
            lq: lt,
            lk: ls,
            key_lens: src_lens,
            causal: false,
        };
        let mut layers = Vec::with_capacity(self.net.dec.len());
        for l in &self.net.dec {
            let (ln1, n1) = self.norm(&l.n1, &y);
            let (mut a, att) = self.attn(&l.att, ln1, None, self_shape);
            let m1 = dropout(&mut a, p, rng);
            add_into(&mut y, &a);
            let (ln2, n2) = self.norm(&l.n2, &y);
            let (mut c, cross) = self.attn(&l.cross, ln2, Some(memory.to_vec()), cross_shape);
            let m2 = dropout(&mut c, p, rng);
            add_into(&mut y, &c);
            let (ln3, n3) = self.norm(&l.n3, &y);
            let (mut f, ffn) = self.ffn(&l.ffn, ln3);
            let m3 = dropout(&mut f, p, rng);
            add_into(&mut y, &f);
            layers.push(DecCache {
                n1,
                att,
                m1,
                n2,
                cross,
                m2,
                n3,
                ffn,
                m3,
            });
        }
        let (out, norm) = self.norm(&self.net.dec_norm, &y);
        (out, DecStack { layers, norm })
    }

    /// Returns the gradient w.r.t. the decoder input embeddings and
    /// accumulates the gradient w.r.t. the encoder memory into `dmem`.
    fn decode_bwd(&self, c: &DecStack<T>, dout: &[T], shapes: (Shape, Shape), dmem: &mut [T], g: &mut [T]) -> Vec<T> {
        let mut dy = self.norm_bwd(&self.net.dec_norm, &c.norm, dout, g);
        for (l, lc) in self.net.dec.iter().zip(&c.layers).rev() {
            let df = masked(&dy, &lc.m3);
            let dln3 = self.ffn_bwd(&l.ffn, &lc.ffn, &df, g);
            add_into(&mut dy, &self.norm_bwd(&l.n3, &lc.n3, &dln3, g));
            let dc = masked(&dy, &lc.m2);
            let (dln2, dm) = self.attn_bwd(&l.cross, &lc.cross, &dc, shapes.1, g);
            add_into(dmem, &dm.expect("cross attention has separate keys"));
            add_into(&mut dy, &self.norm_bwd(&l.n2, &lc.n2, &dln2, g));
            let da = masked(&dy, &lc.m1);
            let (dln1, _) = self.attn_bwd(&l.att, &lc.att, &da, shapes.0, g);
            add_into(&mut dy, &self.norm_bwd(&l.n1, &lc.n1, &dln1, g));
        }
        dy
    }

    fn out_weight(&self) -> Range<usize> {
        self.net.out_w.clone().unwrap_or_else(|| self.net.embed.clone())
    }

    /// Tied weights carry the embedding scale, so their logits are damped.
    fn logit_scale(&self) -> T {
        match self.net.out_w {
            Some(_) => T::one(),
            None => T::of(1.0 / (self.d() as f64).sqrt()),
        }
    }

    /// Logits for the given hidden rows, `rows × vocab`.
    fn logits(&self, hidden: &[T]) -> Vec<T> {
        let (d, v) = (self.d(), self.config.vocab_size);
        let rows = hidden.len() / d;
        let mut out = Vec::with_capacity(rows * v);
        for _ in 0..rows {
            out.extend_from_slice(&self.params[self.net.out_b.clone()]);
        }
        gemm(
            self.logit_scale(),
            hidden,
            View::mat(0, rows, d),
            &self.params,
            View::mat(self.out_weight().start, v, d).t(),
            T::one(),
            &mut out,
            View::mat(0, rows, v),
        );
        out
    }

    /// Label-smoothed cross-entropy over the batch's target tokens. With
    /// `grads`, backpropagates `scale · loss` and adds the gradient into it.
    /// With `rng`, dropout is active.
    pub fn loss(
        &self,
        batch: &Batch,
        smoothing: f64,
        scale: T,
        rng: Option<ChaCha8Rng>,
        grads: Option<&mut [T]>,
    ) -> LossStats {
        let mut rng = rng;
        let (d, v) = (self.d(), self.config.vocab_size);
        let (b, ls, lt) = (batch.size, batch.src_len, batch.tgt_len);
        let (memory, enc) = self.encode_fwd(&batch.src, b, ls, &batch.src_lens, &mut rng);
        let (hidden, dec) = self.decode_fwd(&batch.tgt_in, b, lt, &batch.tgt_lens, &memory, ls, &batch.src_lens, &mut rng);
        let mut logits = self.logits(&hidden);

        let mut stats = LossStats::default();
        let (eps, vf) = (smoothing, v as f64);
        let pad = batch.tgt_pad_mask();
        for r in 0..b * lt {
            let row = &mut logits[r * v..(r + 1) * v];
            if pad[r] {
                row.iter_mut().for_each(|x| *x = T::zero());
                continue;
            }
            let max = row.iter().copied().fold(T::neg_infinity(), T::max).f64();
            let lse = max + row.iter().map(|x| (x.f64() - max).exp()).sum::<f64>().ln();
            let y = batch.tgt_out[r] as usize;
            let nll = lse - row[y].f64();
            let mean_logit = row.iter().map(|x| x.f64()).sum::<f64>() / vf;
            stats.nll += nll;
            stats.loss += (1.0 - eps) * nll + eps * (lse - mean_logit);
            stats.tokens += 1;
            // d loss / d logits = softmax − smoothed target
            for (j, x) in row.iter_mut().enumerate() {
                let p = (x.f64() - lse).exp();
                let q = eps / vf + if j == y { 1.0 - eps } else { 0.0 };
                *x = T::of(p - q) * scale;
            }
        }
        let Some(g) = grads else {
            return stats;
        };

        let rows = b * lt;
        let ow = self.out_weight();
        let ls_ = self.logit_scale();
        gemm(
            ls_,
            &logits,
            View::mat(0, rows, v).t(),
            &hidden,
            View::mat(0, rows, d),
            T::one(),
            g,
            View::mat(ow.start, v, d),
        );
        let gb = &mut g[self.net.out_b.clone()];
        for row in logits.chunks_exact(v) {
            add_into(gb, row);
        }
        let mut dhidden = vec![T::zero(); rows * d];
        gemm(
            ls_,
            &logits,
            View::mat(0, rows, v),
            &self.params,
            View::mat(ow.start, v, d),
            T::zero(),
            &mut dhidden,
            View::mat(0, rows, d),
        );
        drop(logits);

        let self_shape = Shape {
            b,
            lq: lt,
            lk: lt,
            key_lens: &batch.tgt_lens,
            causal: true,
        };
        let cross_shape = Shape {
            b,
            lq: lt,
            lk: ls,
            key_lens: &batch.src_lens,
            causal: false,
        };
        let mut dmem = vec![T::zero(); memory.len()];
        let dy = self.decode_bwd(&dec, &dhidden, (self_shape, cross_shape), &mut dmem, g);
        self.embed_bwd(&batch.tgt_in, &dy, g);
        let enc_shape = Shape {
            b,
            lq: ls,
            lk: ls,
            key_lens: &batch.src_lens,
            causal: false,
        };
        let dx = self.encode_bwd(&enc, &dmem, enc_shape, g);
        self.embed_bwd(&batch.src, &dx, g);
        stats
    }

    /// Encoder output for one source sentence, `len × model_dim`.
    pub fn encode(&self, src: &[u32]) -> Vec<T> {
        self.encode_fwd(src, 1, src.len(), &[src.len()], &mut None).0
    }

    /// Log-probabilities of the next token after each prefix. All prefixes
    /// must have the same length.
    pub fn next_log_probs(&self, memory: &[T], src_len: usize, prefixes: &[Vec<u32>]) -> Vec<Vec<f64>> {
        let (d, v) = (self.d(), self.config.vocab_size);
        let b = prefixes.len();
        let lt = prefixes.first().map_or(0, Vec::len);
        let ids: Vec<u32> = prefixes.iter().flatten().copied().collect();
        let mem: Vec<T> = (0..b).flat_map(|_| memory.iter().copied()).collect();
        let lens = vec![lt; b];
        let src_lens = vec![src_len; b];
        let (hidden, _) = self.decode_fwd(&ids, b, lt, &lens, &mem, src_len, &src_lens, &mut None);
        let last: Vec<T> = (0..b)
            .flat_map(|i| hidden[((i + 1) * lt - 1) * d..(i + 1) * lt * d].iter().copied())
            .collect();
        let logits = self.logits(&last);
        logits
            .chunks_exact(v)
            .map(|row| {
                let max = row.iter().copied().fold(T::neg_infinity(), T::max).f64();
                let lse = max + row.iter().map(|x| (x.f64() - max).exp()).sum::<f64>().ln();
                row.iter().map(|x| x.f64() - lse).collect()
            })
            .collect()
    }

    /// Decoder logits for every target position, `size × tgt_len × vocab`,
    /// without dropout.
    pub fn batch_logits(&self, batch: &Batch) -> Vec<T> {
        let (b, ls, lt) = (batch.size, batch.src_len, batch.tgt_len);
        let (memory, _) = self.encode_fwd(&batch.src, b, ls, &batch.src_lens, &mut None);
        let (hidden, _) = self.decode_fwd(&batch.tgt_in, b, lt, &batch.tgt_lens, &memory, ls, &batch.src_lens, &mut None);
        self.logits(&hidden)
    }

    /// Every attention probability tensor of an inference pass.
    pub fn attention_maps(&self, batch: &Batch) -> Vec<AttentionMap> {
        let (b, ls, lt) = (batch.size, batch.src_len, batch.tgt_len);
        let h = self.config.heads;
        let (memory, enc) = self.encode_fwd(&batch.src, b, ls, &batch.src_lens, &mut None);
        let (_, dec) = self.decode_fwd(&batch.tgt_in, b, lt, &batch.tgt_lens, &memory, ls, &batch.src_lens, &mut None);
        let map = |kind, layer, lq, lk, probs: &[T]| AttentionMap {
            kind,
            layer,
            heads: h,
            lq,
            lk,
            probs: probs.iter().map(|x| x.f64()).collect(),
        };
        let mut out = Vec::new();
        for (i, c) in enc.layers.iter().enumerate() {
            out.push(map("encoder", i, ls, ls, &c.att.probs));
        }
        for (i, c) in dec.layers.iter().enumerate() {
            out.push(map("decoder", i, lt, lt, &c.att.probs));
            out.push(map("cross", i, lt, ls, &c.cross.probs));
        }
        out
    }

    /// Same architecture and weights in another precision.
    pub fn cast<U: Float>(&self) -> Transformer<U> {
        Transformer {
            config: self.config.clone(),
            slots: self.slots.clone(),
            net: self.net.clone(),
            params: self.params.iter().map(|x| U::of(x.f64())).collect(),
            pe: self.pe.iter().map(|x| U::of(x.f64())).collect(),
        }
    }
}
