use crate::error::{Error, Result};
use crate::modring::PrimeField;
use crate::transforms::{BoxDim, Direction, Ntt, Tensor};

/// Partial order on the values of a single coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordOrder {
    /// The total order 0 < 1 < ... < r-1.
    Chain(usize),
    /// Label order in which every low label of a side lies below that side's top label
    /// and nothing else is comparable. Slots follow the label layout: sigma lows, the
    /// sigma top (if present), rho lows, the rho top (if present).
    Flat(FlatOrder),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlatOrder {
    pub sigma_low: usize,
    pub sigma_top: bool,
    pub rho_low: usize,
    pub rho_top: bool,
}

impl FlatOrder {
    /// Order used for Total Dominating Set labels {|0|, |>=1|} on both sides.
    pub fn tds_pairs() -> Self {
        FlatOrder { sigma_low: 1, sigma_top: true, rho_low: 1, rho_top: true }
    }

    fn sides(&self) -> [(usize, usize, bool); 2] {
        let sigma_len = self.sigma_low + self.sigma_top as usize;
        [(0, self.sigma_low, self.sigma_top), (sigma_len, self.rho_low, self.rho_top)]
    }
}

impl CoordOrder {
    pub fn size(&self) -> usize {
        match *self {
            CoordOrder::Chain(r) => r,
            CoordOrder::Flat(f) => {
                f.sigma_low + f.sigma_top as usize + f.rho_low + f.rho_top as usize
            }
        }
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        match *self {
            CoordOrder::Chain(_) => a <= b,
            CoordOrder::Flat(f) => {
                if a == b {
                    return true;
                }
                f.sides().iter().any(|&(start, low, top)| {
                    top && b == start + low && (start..start + low).contains(&a)
                })
            }
        }
    }

    /// Zeta (or Moebius) transform of one line of length `size()`, in place.
    fn line(&self, field: &PrimeField, a: &mut [u64], direction: Direction) {
        match *self {
            CoordOrder::Chain(_) => match direction {
                Direction::Forward => {
                    for i in 1..a.len() {
                        a[i] = field.add(a[i], a[i - 1]);
                    }
                }
                Direction::Inverse => {
                    for i in (1..a.len()).rev() {
                        a[i] = field.sub(a[i], a[i - 1]);
                    }
                }
            },
            CoordOrder::Flat(f) => {
                for (start, low, top) in f.sides() {
                    if !top {
                        continue;
                    }
                    let t = start + low;
                    for i in start..t {
                        a[t] = match direction {
                            Direction::Forward => field.add(a[t], a[i]),
                            Direction::Inverse => field.sub(a[t], a[i]),
                        };
                    }
                }
            }
        }
    }
}

/// Applies the order's zeta (forward) or Moebius (inverse) transform along each listed axis
/// of a row-major array. Axes not listed are left alone.
pub(crate) fn zeta_axes(
    field: &PrimeField,
    data: &mut [u64],
    sizes: &[usize],
    axes: &[usize],
    order: CoordOrder,
    direction: Direction,
) {
    let total: usize = sizes.iter().product();
    let n = order.size();
    let mut line = vec![0u64; n];
    for &axis in axes {
        debug_assert_eq!(sizes[axis], n);
        let stride: usize = sizes[axis + 1..].iter().product();
        let block = n * stride;
        for base in (0..total).step_by(block.max(1)) {
            for i in 0..stride {
                for j in 0..n {
                    line[j] = data[base + j * stride + i];
                }
                order.line(field, &mut line, direction);
                for j in 0..n {
                    data[base + j * stride + i] = line[j];
                }
            }
        }
    }
}

/// Zeta transform of the chain order along every dimension (prefix sums).
pub fn zeta_chain(t: &Tensor, direction: Direction) -> Tensor {
    let mut out = t.clone();
    let sizes = t.sizes();
    for (axis, &n) in sizes.iter().enumerate() {
        zeta_axes(&t.field, &mut out.data, &sizes, &[axis], CoordOrder::Chain(n), direction);
    }
    out
}

fn check_order_dims(t: &Tensor, order: CoordOrder, axes: &[usize]) -> Result<()> {
    for &a in axes {
        if a >= t.dims.len() || t.dims[a].size != order.size() {
            return Err(Error::Order(format!(
                "dimension {a} does not have the order's size {}",
                order.size()
            )));
        }
    }
    Ok(())
}

/// Zeta transform of the product order P^k; every dimension must have size |P|.
pub fn zeta_product_order(t: &Tensor, order: CoordOrder, direction: Direction) -> Result<Tensor> {
    let axes: Vec<usize> = (0..t.dims.len()).collect();
    check_order_dims(t, order, &axes)?;
    let mut out = t.clone();
    zeta_axes(&t.field, &mut out.data, &t.sizes(), &axes, order, direction);
    Ok(out)
}

/// Covering product: h(x) = sum over pairs whose join is x, when P is a join-semilattice
/// with respect to the given order.
pub fn covering_product(f: &Tensor, g: &Tensor, order: CoordOrder) -> Result<Tensor> {
    if f.field != g.field {
        return Err(Error::FieldMismatch);
    }
    if f.dims != g.dims {
        return Err(Error::Shape("operands have different dimensions".into()));
    }
    let zf = zeta_product_order(f, order, Direction::Forward)?;
    let zg = zeta_product_order(g, order, Direction::Forward)?;
    let mut h = zf;
    for (a, &b) in h.data.iter_mut().zip(&zg.data) {
        *a = f.field.mul(*a, b);
    }
    zeta_product_order(&h, order, Direction::Inverse)
}

/// Covering product over the order axes combined with a truncated linear convolution over
/// every other axis.
pub fn cover_convolution(
    f: &Tensor,
    g: &Tensor,
    order: CoordOrder,
    order_axes: &[usize],
) -> Result<Tensor> {
    if f.field != g.field {
        return Err(Error::FieldMismatch);
    }
    if f.dims != g.dims {
        return Err(Error::Shape("operands have different dimensions".into()));
    }
    check_order_dims(f, order, order_axes)?;
    let field = &*f.field;
    let sizes = f.sizes();
    let mut zf = f.data.clone();
    let mut zg = g.data.clone();
    zeta_axes(field, &mut zf, &sizes, order_axes, order, Direction::Forward);
    zeta_axes(field, &mut zg, &sizes, order_axes, order, Direction::Forward);
    let mut ntt = Ntt::new(field);
    let boxes: Vec<BoxDim> = sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            if order_axes.contains(&i) {
                BoxDim::linear(n, n)
            } else {
                BoxDim::linear(n, crate::transforms::linear_pad(n))
            }
        })
        .collect();
    let mut h = pointwise_over_order(&mut ntt, &boxes, order_axes, &zf, &zg)?;
    zeta_axes(field, &mut h, &sizes, order_axes, order, Direction::Inverse);
    Ok(Tensor { dims: f.dims.clone(), data: h, field: f.field.clone() })
}

/// Convolves along the non-order axes separately for every fixed index of the order axes.
fn pointwise_over_order(
    ntt: &mut Ntt,
    boxes: &[BoxDim],
    order_axes: &[usize],
    f: &[u64],
    g: &[u64],
) -> Result<Vec<u64>> {
    let sizes: Vec<usize> = boxes.iter().map(|b| b.size).collect();
    let perm: Vec<usize> = order_axes
        .iter()
        .copied()
        .chain((0..sizes.len()).filter(|i| !order_axes.contains(i)))
        .collect();
    let pf = permute(f, &sizes, &perm);
    let pg = permute(g, &sizes, &perm);
    let outer: usize = order_axes.iter().map(|&a| sizes[a]).product();
    let inner_boxes: Vec<BoxDim> = perm[order_axes.len()..].iter().map(|&a| boxes[a]).collect();
    let inner: usize = inner_boxes.iter().map(|b| b.size).product();
    let mut ph = vec![0u64; pf.len()];
    for o in 0..outer {
        let range = o * inner..(o + 1) * inner;
        let h = ntt.convolve(&inner_boxes, &pf[range.clone()], &pg[range.clone()])?;
        ph[range].copy_from_slice(&h);
    }
    let psizes: Vec<usize> = perm.iter().map(|&a| sizes[a]).collect();
    let mut inv = vec![0; perm.len()];
    for (i, &a) in perm.iter().enumerate() {
        inv[a] = i;
    }
    Ok(permute(&ph, &psizes, &inv))
}

/// Transposes a row-major array so that output axis i is input axis `perm[i]`.
fn permute(src: &[u64], sizes: &[usize], perm: &[usize]) -> Vec<u64> {
    if perm.iter().enumerate().all(|(i, &a)| i == a) {
        return src.to_vec();
    }
    let k = sizes.len();
    let mut strides = vec![1usize; k];
    for i in (0..k.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * sizes[i + 1];
    }
    let out_sizes: Vec<usize> = perm.iter().map(|&a| sizes[a]).collect();
    let out_strides: Vec<usize> = perm.iter().map(|&a| strides[a]).collect();
    let mut out = Vec::with_capacity(src.len());
    let mut idx = vec![0usize; k];
    let mut off = 0usize;
    for _ in 0..src.len() {
        out.push(src[off]);
        for i in (0..k).rev() {
            idx[i] += 1;
            off += out_strides[i];
            if idx[i] < out_sizes[i] {
                break;
            }
            off -= out_strides[i] * out_sizes[i];
            idx[i] = 0;
        }
    }
    out
}
