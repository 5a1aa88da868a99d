use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::modring::{record_ops, PrimeField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DimKind {
    Cyclic,
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dim {
    pub size: usize,
    pub kind: DimKind,
}

impl Dim {
    pub fn cyclic(size: usize) -> Self {
        Dim { size, kind: DimKind::Cyclic }
    }

    pub fn linear(size: usize) -> Self {
        Dim { size, kind: DimKind::Linear }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Dense row-major tensor over a prime field; the last dimension varies fastest.
#[derive(Clone, Debug)]
pub struct Tensor {
    pub dims: Vec<Dim>,
    pub data: Vec<u64>,
    pub field: Arc<PrimeField>,
}

impl Tensor {
    pub fn zeros(field: Arc<PrimeField>, dims: Vec<Dim>) -> Self {
        let len = dims.iter().map(|d| d.size).product();
        Tensor { dims, data: vec![0; len], field }
    }

    pub fn from_data(field: Arc<PrimeField>, dims: Vec<Dim>, data: Vec<u64>) -> Result<Self> {
        let len: usize = dims.iter().map(|d| d.size).product();
        if len != data.len() {
            return Err(Error::Shape(format!("{} values for {} cells", data.len(), len)));
        }
        let p = field.modulus();
        let data = data.into_iter().map(|x| x % p).collect();
        Ok(Tensor { dims, data, field })
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d.size).collect()
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, d)| acc * d.size + i)
    }

    pub fn get(&self, index: &[usize]) -> u64 {
        self.data[self.offset(index)]
    }

    pub fn set(&mut self, index: &[usize], value: u64) {
        let o = self.offset(index);
        self.data[o] = value % self.field.modulus();
    }
}

/// Transform of a single sequence with an explicit root `omega` of order `seq.len()`.
pub fn dft(seq: &[u64], omega: u64, direction: Direction, field: &PrimeField) -> Result<Vec<u64>> {
    let r = seq.len();
    if r == 0 {
        return Ok(Vec::new());
    }
    check_order(field, omega, r as u64)?;
    let w = match direction {
        Direction::Forward => omega,
        Direction::Inverse => field.inv(omega)?,
    };
    let tw = powers(field, w, r);
    let mut out: Vec<u64> = seq.iter().map(|&x| x % field.modulus()).collect();
    let mut scratch = vec![0; r];
    transform_line(field, &mut out, &tw, &mut scratch);
    if direction == Direction::Inverse && r > 1 {
        let s = field.inv(r as u64 % field.modulus())?;
        for x in &mut out {
            *x = field.mul(*x, s);
        }
    }
    Ok(out)
}

fn check_order(field: &PrimeField, omega: u64, r: u64) -> Result<()> {
    let one = 1 % field.modulus();
    if field.pow(omega, r) != one {
        return Err(Error::Order(format!("{omega} is not an {r}-th root of unity")));
    }
    let mut n = r;
    let mut q = 2;
    while n > 1 {
        if n.is_multiple_of(q) {
            if field.pow(omega, r / q) == one {
                return Err(Error::Order(format!("{omega} has order below {r}")));
            }
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    Ok(())
}

/// Multidimensional transform; every dimension is treated as cyclic of its own size.
pub fn multidim_dft(t: &Tensor, direction: Direction) -> Result<Tensor> {
    let mut ntt = Ntt::new(&t.field);
    let mut out = t.clone();
    ntt.transform(&mut out.data, &t.sizes(), direction)?;
    Ok(out)
}

fn same_shape(f: &Tensor, g: &Tensor) -> Result<()> {
    if f.field != g.field {
        return Err(Error::FieldMismatch);
    }
    if f.dims != g.dims {
        return Err(Error::Shape("operands have different dimensions".into()));
    }
    Ok(())
}

/// Sum over index pairs that add up modulo every dimension size.
pub fn cyclic_convolution(f: &Tensor, g: &Tensor) -> Result<Tensor> {
    same_shape(f, g)?;
    let dims: Vec<Dim> = f.dims.iter().map(|d| Dim::cyclic(d.size)).collect();
    convolve_tensors(f, g, dims)
}

/// Sum over index pairs whose plain sum equals the output index, truncated to the box.
pub fn noncyclic_convolution(f: &Tensor, g: &Tensor) -> Result<Tensor> {
    same_shape(f, g)?;
    let dims: Vec<Dim> = f.dims.iter().map(|d| Dim::linear(d.size)).collect();
    convolve_tensors(f, g, dims)
}

/// Cyclic along dimensions marked cyclic, linear (truncated) along the others.
pub fn combined_convolution(f: &Tensor, g: &Tensor) -> Result<Tensor> {
    same_shape(f, g)?;
    convolve_tensors(f, g, f.dims.clone())
}

fn convolve_tensors(f: &Tensor, g: &Tensor, dims: Vec<Dim>) -> Result<Tensor> {
    let boxes: Vec<BoxDim> = dims
        .iter()
        .map(|d| match d.kind {
            DimKind::Cyclic => BoxDim::cyclic(d.size),
            DimKind::Linear => BoxDim::linear(d.size, linear_pad(d.size)),
        })
        .collect();
    let mut ntt = Ntt::new(&f.field);
    let data = ntt.convolve(&boxes, &f.data, &g.data)?;
    Ok(Tensor { dims, data, field: f.field.clone() })
}

/// Smallest power of two that holds a linear convolution truncated to `q` without wrap-around.
pub fn linear_pad(q: usize) -> usize {
    (2 * q.max(1) - 1).next_power_of_two()
}

/// One dimension of a convolution box: `size` cells in the input and output, transformed
/// with length `pad` (equal to `size` for cyclic dimensions).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct BoxDim {
    pub size: usize,
    pub pad: usize,
}

impl BoxDim {
    pub fn cyclic(size: usize) -> Self {
        BoxDim { size, pad: size }
    }

    pub fn linear(size: usize, pad: usize) -> Self {
        BoxDim { size, pad }
    }
}

struct Twiddles {
    forward: Vec<u64>,
    inverse: Vec<u64>,
    forward_shoup: Vec<u64>,
    inverse_shoup: Vec<u64>,
}

/// Transform engine over a single field, caching twiddle tables and inverse lengths.
pub(crate) struct Ntt<'a> {
    field: &'a PrimeField,
    twiddles: HashMap<usize, Twiddles>,
    inv_len: HashMap<usize, u64>,
    scratch: Vec<u64>,
    line: Vec<u64>,
}

impl<'a> Ntt<'a> {
    pub fn new(field: &'a PrimeField) -> Self {
        Ntt {
            field,
            twiddles: HashMap::new(),
            inv_len: HashMap::new(),
            scratch: Vec::new(),
            line: Vec::new(),
        }
    }

    pub fn field(&self) -> &'a PrimeField {
        self.field
    }

    fn prepare(&mut self, n: usize) -> Result<()> {
        if n <= 1 || self.twiddles.contains_key(&n) {
            return Ok(());
        }
        let w = self.field.root(n as u64)?;
        let wi = self.field.inverse_root(n as u64)?;
        let forward = powers(self.field, w, n);
        let inverse = powers(self.field, wi, n);
        let tw = Twiddles {
            forward_shoup: forward.iter().map(|&x| self.field.shoup(x)).collect(),
            inverse_shoup: inverse.iter().map(|&x| self.field.shoup(x)).collect(),
            forward,
            inverse,
        };
        self.twiddles.insert(n, tw);
        Ok(())
    }

    fn inverse_length(&mut self, total: usize) -> Result<u64> {
        if let Some(&v) = self.inv_len.get(&total) {
            return Ok(v);
        }
        let v = self.field.inv(total as u64 % self.field.modulus())?;
        self.inv_len.insert(total, v);
        Ok(v)
    }

    /// In-place multidimensional transform of a row-major array with the given sizes.
    pub fn transform(&mut self, data: &mut [u64], sizes: &[usize], direction: Direction) -> Result<()> {
        self.transform_axes(data, sizes, 0..sizes.len(), direction, true)?;
        if direction == Direction::Inverse {
            self.scale(data, sizes.iter().product())?;
        }
        Ok(())
    }

    /// Unscaled transform along the axes in `axes`; the remaining axes are left untouched.
    fn transform_axes(
        &mut self,
        data: &mut [u64],
        sizes: &[usize],
        axes: std::ops::Range<usize>,
        direction: Direction,
        natural: bool,
    ) -> Result<()> {
        let total: usize = sizes.iter().product();
        debug_assert_eq!(total, data.len());
        let mut stride = total;
        for (axis, &n) in sizes.iter().enumerate() {
            stride /= n.max(1);
            if n <= 1 || !axes.contains(&axis) {
                continue;
            }
            self.prepare(n)?;
            let tw = &self.twiddles[&n];
            let (tw, tws) = match direction {
                Direction::Forward => (&tw.forward, &tw.forward_shoup),
                Direction::Inverse => (&tw.inverse, &tw.inverse_shoup),
            };
            self.line.resize(n, 0);
            self.scratch.resize(n, 0);
            let block = n * stride;
            if n == 2 {
                rows2(self.field, data, stride);
                continue;
            }
            if n == 3 {
                rows3(self.field, data, stride, tw[1], tws[1]);
                continue;
            }
            if n.is_power_of_two() {
                for chunk in data.chunks_exact_mut(block) {
                    if natural || direction == Direction::Inverse {
                        radix2_rows(self.field, chunk, stride, tw, tws, natural);
                    } else {
                        dif_rows(self.field, chunk, stride, tw, tws);
                    }
                }
                continue;
            }
            for base in (0..total).step_by(block) {
                if stride == 1 {
                    transform_line(self.field, &mut data[base..base + n], tw, &mut self.scratch);
                    continue;
                }
                for i in 0..stride {
                    for j in 0..n {
                        self.line[j] = data[base + j * stride + i];
                    }
                    transform_line(self.field, &mut self.line, tw, &mut self.scratch);
                    for j in 0..n {
                        data[base + j * stride + i] = self.line[j];
                    }
                }
            }
        }
        Ok(())
    }

    /// Multiplies every entry by the inverse of `total`, the length of an inverse transform.
    fn scale(&mut self, data: &mut [u64], total: usize) -> Result<()> {
        if total <= 1 {
            return Ok(());
        }
        let s = self.inverse_length(total)?;
        self.scale_by(data, s);
        Ok(())
    }

    fn scale_by(&self, data: &mut [u64], s: u64) {
        if s == 1 {
            return;
        }
        let ss = self.field.shoup(s);
        let mut mults = 0;
        for x in data.iter_mut() {
            if *x != 0 {
                mults += 1;
                *x = self.field.mul_shoup(*x, s, ss);
            }
        }
        record_ops(mults, 0);
    }

    /// Pointwise product in place; returns the factor that the result still has to be
    /// multiplied by.
    fn pointwise(&self, a: &mut [u64], b: &[u64]) -> u64 {
        let field = self.field;
        let mut mults = 0;
        let mont = field.has_mont() && a.len() > 1;
        for (x, &y) in a.iter_mut().zip(b) {
            *x = if *x == 0 || y == 0 {
                0
            } else {
                mults += 1;
                if mont {
                    field.mul_mont(*x, y)
                } else {
                    field.mul_raw(*x, y)
                }
            };
        }
        record_ops(mults, 0);
        if mont {
            field.mont_factor()
        } else {
            1
        }
    }

    /// Unscaled inverse transform followed by one scaling pass that also applies `factor`.
    fn finish_inverse(&mut self, data: &mut [u64], total: usize, factor: u64) -> Result<()> {
        let s = if total <= 1 { 1 } else { self.inverse_length(total)? };
        let s = self.field.mul_raw(s, factor);
        self.scale_by(data, s);
        Ok(())
    }

    /// Convolution of two arrays laid out on the same box. Each dimension is transformed with
    /// its `pad` length; inputs are zero-extended and the output is cut back to the box. Axes
    /// are padded one at a time, most occupied first, so every forward pass runs on the
    /// occupied rows of the axes still to come; the inverse visits them in the opposite order
    /// and cuts each axis right after its pass.
    pub fn convolve(&mut self, dims: &[BoxDim], f: &[u64], g: &[u64]) -> Result<Vec<u64>> {
        let total: usize = dims.iter().map(|d| d.pad).product();
        let mut axes: Vec<usize> = (0..dims.len()).collect();
        axes.sort_by(|&a, &b| (dims[b].size * dims[a].pad).cmp(&(dims[a].size * dims[b].pad)).then(b.cmp(&a)));
        let mut spectra = [f, g].map(|x| x.to_vec());
        for v in spectra.iter_mut() {
            let mut shape: Vec<usize> = dims.iter().map(|d| d.size).collect();
            for &a in &axes {
                if dims[a].pad != shape[a] {
                    *v = resize_axis(v, &shape, a, dims[a].pad);
                    shape[a] = dims[a].pad;
                }
                self.transform_axes(v, &shape, a..a + 1, Direction::Forward, false)?;
            }
        }
        let [mut fp, gp] = spectra;
        let factor = self.pointwise(&mut fp, &gp);
        let mut shape: Vec<usize> = dims.iter().map(|d| d.pad).collect();
        for &a in axes.iter().rev() {
            self.transform_axes(&mut fp, &shape, a..a + 1, Direction::Inverse, false)?;
            if dims[a].size != shape[a] {
                fp = resize_axis(&fp, &shape, a, dims[a].size);
                shape[a] = dims[a].size;
            }
        }
        self.finish_inverse(&mut fp, total, factor)?;
        Ok(fp)
    }
}

/// Row-major array with axis `axis` zero-extended or cut to `len`.
fn resize_axis(data: &[u64], shape: &[usize], axis: usize, len: usize) -> Vec<u64> {
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let keep = shape[axis].min(len) * inner;
    let mut out = vec![0u64; outer * len * inner];
    for (src, dst) in data.chunks_exact(shape[axis] * inner).zip(out.chunks_exact_mut(len * inner)) {
        dst[..keep].copy_from_slice(&src[..keep]);
    }
    out
}

fn powers(field: &PrimeField, w: u64, n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut x = 1 % field.modulus();
    for _ in 0..n {
        out.push(x);
        x = field.mul(x, w);
    }
    out
}

/// Length-2 and length-3 transforms of the line starting at `i` with the given stride. The
/// length-3 case uses w^2 = -1 - w to get by with one multiplication.
#[inline(always)]
fn small_strided(field: &PrimeField, data: &mut [u64], i: usize, stride: usize, n: usize, tw: &[u64]) {
    if n == 2 {
        let (x, y) = (data[i], data[i + stride]);
        data[i] = field.add(x, y);
        data[i + stride] = field.sub(x, y);
    } else {
        let (a0, a1, a2) = (data[i], data[i + stride], data[i + 2 * stride]);
        let d = field.sub(a1, a2);
        let t = if d == 0 { 0 } else { field.mul(d, tw[1]) };
        data[i] = field.add(field.add(a0, a1), a2);
        data[i + stride] = field.add(field.sub(a0, a2), t);
        data[i + 2 * stride] = field.sub(field.sub(a0, a1), t);
    }
}

/// Length-2 transforms along an axis of size two with `width` lanes per row.
fn rows2(field: &PrimeField, data: &mut [u64], width: usize) {
    for chunk in data.chunks_exact_mut(2 * width) {
        let (top, bottom) = chunk.split_at_mut(width);
        for (u, x) in top.iter_mut().zip(bottom.iter_mut()) {
            let t = *u;
            *u = field.add_raw(t, *x);
            *x = field.sub_raw(t, *x);
        }
    }
    record_ops(0, data.len() as u64);
}

/// Length-3 transforms along an axis of size three with `width` lanes per row.
fn rows3(field: &PrimeField, data: &mut [u64], width: usize, w: u64, ws: u64) {
    let mut mults = 0;
    for chunk in data.chunks_exact_mut(3 * width) {
        let (r0, rest) = chunk.split_at_mut(width);
        let (r1, r2) = rest.split_at_mut(width);
        for ((a0, a1), a2) in r0.iter_mut().zip(r1.iter_mut()).zip(r2.iter_mut()) {
            let d = field.sub_raw(*a1, *a2);
            let t = if d == 0 {
                0
            } else {
                mults += 1;
                field.mul_shoup(d, w, ws)
            };
            let (x0, x1, x2) = (*a0, *a1, *a2);
            *a0 = field.add_raw(field.add_raw(x0, x1), x2);
            *a1 = field.add_raw(field.sub_raw(x0, x2), t);
            *a2 = field.sub_raw(field.sub_raw(x0, x1), t);
        }
    }
    record_ops(mults, 7 * data.len() as u64 / 3);
}

/// Transforms one line in place; `tw[t]` holds the t-th power of the root of order `a.len()`.
fn transform_line(field: &PrimeField, a: &mut [u64], tw: &[u64], scratch: &mut [u64]) {
    let n = a.len();
    if n <= 1 {
        return;
    }
    if n <= 3 {
        small_strided(field, a, 0, 1, n, tw);
        return;
    }
    if n.is_power_of_two() {
        radix2(field, a, tw);
        return;
    }
    for (i, out) in scratch.iter_mut().enumerate().take(n) {
        let mut acc = a[0];
        for (j, &x) in a.iter().enumerate().skip(1) {
            if x == 0 {
                continue;
            }
            let e = i * j % n;
            let term = if e == 0 { x } else { field.mul(x, tw[e]) };
            acc = field.add(acc, term);
        }
        *out = acc;
    }
    a.copy_from_slice(&scratch[..n]);
}

fn radix2(field: &PrimeField, a: &mut [u64], tw: &[u64]) {
    let n = a.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        for start in (0..n).step_by(len) {
            for j in 0..half {
                let u = a[start + j];
                let x = a[start + j + half];
                let v = if j == 0 || x == 0 { x } else { field.mul(x, tw[j * step]) };
                a[start + j] = field.add(u, v);
                a[start + j + half] = field.sub(u, v);
            }
        }
        len <<= 1;
    }
}

/// Radix-2 transform along the leading axis of a block of `n` rows, each of `width` lanes.
/// Without `reorder` the input is expected in bit-reversed row order.
fn radix2_rows(field: &PrimeField, a: &mut [u64], width: usize, tw: &[u64], tws: &[u64], reorder: bool) {
    let n = a.len() / width;
    let bits = n.trailing_zeros();
    for i in (0..n).filter(|_| reorder) {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            let (lo, hi) = a.split_at_mut(j * width);
            lo[i * width..(i + 1) * width].swap_with_slice(&mut hi[..width]);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        let mut mults = 0;
        for start in (0..n).step_by(len) {
            for j in 0..half {
                let (w, ws) = (tw[j * step], tws[j * step]);
                let (lo, hi) = a.split_at_mut((start + j + half) * width);
                let top = &mut lo[(start + j) * width..(start + j + 1) * width];
                let bottom = &mut hi[..width];
                if j == 0 {
                    for (u, x) in top.iter_mut().zip(bottom.iter_mut()) {
                        let t = *u;
                        *u = field.add_raw(t, *x);
                        *x = field.sub_raw(t, *x);
                    }
                } else {
                    for (u, x) in top.iter_mut().zip(bottom.iter_mut()) {
                        let v = if *x == 0 {
                            0
                        } else {
                            mults += 1;
                            field.mul_shoup(*x, w, ws)
                        };
                        let t = *u;
                        *u = field.add_raw(t, v);
                        *x = field.sub_raw(t, v);
                    }
                }
            }
        }
        record_ops(mults, (n * width) as u64);
        len <<= 1;
    }
}

/// Decimation-in-frequency transform along the leading axis: natural row order in,
/// bit-reversed row order out.
fn dif_rows(field: &PrimeField, a: &mut [u64], width: usize, tw: &[u64], tws: &[u64]) {
    let n = a.len() / width;
    let mut len = n;
    while len >= 2 {
        let half = len / 2;
        let step = n / len;
        let mut mults = 0;
        for start in (0..n).step_by(len) {
            for j in 0..half {
                let (w, ws) = (tw[j * step], tws[j * step]);
                let (lo, hi) = a.split_at_mut((start + j + half) * width);
                let top = &mut lo[(start + j) * width..(start + j + 1) * width];
                let bottom = &mut hi[..width];
                for (u, x) in top.iter_mut().zip(bottom.iter_mut()) {
                    let (t, y) = (*u, *x);
                    *u = field.add_raw(t, y);
                    let d = field.sub_raw(t, y);
                    *x = if j == 0 || d == 0 {
                        d
                    } else {
                        mults += 1;
                        field.mul_shoup(d, w, ws)
                    };
                }
            }
        }
        record_ops(mults, (n * width) as u64);
        len >>= 1;
    }
}
