use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::posets::FlatOrder;

/// A finite or cofinite subset of the natural numbers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IntSet {
    Finite(BTreeSet<u32>),
    /// All naturals except the listed ones.
    Cofinite(BTreeSet<u32>),
}

impl IntSet {
    pub fn finite(items: impl IntoIterator<Item = u32>) -> Self {
        IntSet::Finite(items.into_iter().collect())
    }

    pub fn cofinite(excluded: impl IntoIterator<Item = u32>) -> Self {
        IntSet::Cofinite(excluded.into_iter().collect())
    }

    pub fn naturals() -> Self {
        IntSet::Cofinite(BTreeSet::new())
    }

    pub fn contains(&self, n: u32) -> bool {
        match self {
            IntSet::Finite(s) => s.contains(&n),
            IntSet::Cofinite(s) => !s.contains(&n),
        }
    }

    pub fn is_cofinite(&self) -> bool {
        matches!(self, IntSet::Cofinite(_))
    }

    /// Largest element of a finite set, or one more than the largest excluded element of a
    /// cofinite set (0 when nothing is excluded).
    pub fn ell(&self) -> u32 {
        match self {
            IntSet::Finite(s) => s.iter().next_back().copied().unwrap_or(0),
            IntSet::Cofinite(s) => s.iter().next_back().map_or(0, |m| m + 1),
        }
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &BTreeSet<u32>| s.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        match self {
            IntSet::Finite(s) if s.is_empty() => write!(f, "{{}}"),
            IntSet::Finite(s) => write!(f, "{}", join(s)),
            IntSet::Cofinite(s) if s.is_empty() => write!(f, "N"),
            IntSet::Cofinite(s) => write!(f, "cofinite:{}", join(s)),
        }
    }
}

impl FromStr for IntSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_list = |body: &str| -> Result<BTreeSet<u32>> {
            body.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|_| Error::Problem(format!("bad number '{t}' in set")))
                })
                .collect()
        };
        if s == "N" || s == "nat" || s == "all" {
            return Ok(IntSet::naturals());
        }
        if s == "{}" {
            return Ok(IntSet::Finite(BTreeSet::new()));
        }
        match s.strip_prefix("cofinite:") {
            Some(body) => Ok(IntSet::Cofinite(parse_list(body)?)),
            None => Ok(IntSet::Finite(parse_list(s)?)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Sigma,
    Rho,
}

/// State of a bag vertex: which side it is on and how many selected neighbours it has
/// among the already forgotten vertices (`at_least` marks the saturated top label).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Label {
    pub side: Side,
    pub count: u32,
    pub at_least: bool,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Sigma => "s",
            Side::Rho => "r",
        };
        if self.at_least {
            write!(f, "|>={}|{side}", self.count)
        } else {
            write!(f, "|{}|{side}", self.count)
        }
    }
}

/// Labels of one side: `low` plain counts 0..low, plus a top label when the side is cofinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SideLabels {
    pub ell: u32,
    pub low: usize,
    pub top: bool,
}

impl SideLabels {
    fn of(set: &IntSet) -> Self {
        let ell = set.ell();
        if set.is_cofinite() {
            SideLabels { ell, low: ell as usize, top: true }
        } else {
            SideLabels { ell, low: ell as usize + 1, top: false }
        }
    }

    pub fn len(&self) -> usize {
        self.low + self.top as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A [sigma, rho] problem together with its label layout. Labels are numbered as digits:
/// sigma lows, the sigma top, rho lows, the rho top.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SigmaRhoSpec {
    pub sigma: IntSet,
    pub rho: IntSet,
    sigma_labels: SideLabels,
    rho_labels: SideLabels,
}

impl SigmaRhoSpec {
    pub fn new(sigma: IntSet, rho: IntSet) -> Self {
        let sigma_labels = SideLabels::of(&sigma);
        let rho_labels = SideLabels::of(&rho);
        SigmaRhoSpec { sigma, rho, sigma_labels, rho_labels }
    }

    pub fn side(&self, side: Side) -> SideLabels {
        match side {
            Side::Sigma => self.sigma_labels,
            Side::Rho => self.rho_labels,
        }
    }

    pub fn set(&self, side: Side) -> &IntSet {
        match side {
            Side::Sigma => &self.sigma,
            Side::Rho => &self.rho,
        }
    }

    /// Number of labels per vertex.
    pub fn s(&self) -> usize {
        self.sigma_labels.len() + self.rho_labels.len()
    }

    pub fn side_offset(&self, side: Side) -> usize {
        match side {
            Side::Sigma => 0,
            Side::Rho => self.sigma_labels.len(),
        }
    }

    pub fn digit(&self, label: Label) -> usize {
        let sl = self.side(label.side);
        let local = if label.at_least { sl.low } else { label.count as usize };
        self.side_offset(label.side) + local
    }

    pub fn label(&self, digit: usize) -> Label {
        let (side, local) = if digit < self.sigma_labels.len() {
            (Side::Sigma, digit)
        } else {
            (Side::Rho, digit - self.sigma_labels.len())
        };
        let sl = self.side(side);
        if local == sl.low {
            Label { side, count: sl.ell, at_least: true }
        } else {
            Label { side, count: local as u32, at_least: false }
        }
    }

    pub fn labels(&self) -> Vec<Label> {
        (0..self.s()).map(|d| self.label(d)).collect()
    }

    pub fn digit_side(&self, digit: usize) -> Side {
        if digit < self.sigma_labels.len() {
            Side::Sigma
        } else {
            Side::Rho
        }
    }

    /// Digit a freshly introduced vertex takes on the given side: no selected neighbours yet.
    pub fn fresh_digit(&self, side: Side) -> usize {
        self.side_offset(side)
    }

    /// Whether a forgotten vertex with this label satisfies its constraint.
    pub fn is_final(&self, digit: usize) -> bool {
        let l = self.label(digit);
        l.at_least || self.set(l.side).contains(l.count)
    }

    /// Label of a vertex whose selected neighbours are split between two children.
    pub fn oplus(&self, a: usize, b: usize) -> Option<usize> {
        let (la, lb) = (self.label(a), self.label(b));
        if la.side != lb.side {
            return None;
        }
        let sl = self.side(la.side);
        let sum = la.count + lb.count;
        let label = if sl.top && (la.at_least || lb.at_least || sum >= sl.ell) {
            Label { side: la.side, count: sl.ell, at_least: true }
        } else if sum <= sl.ell {
            Label { side: la.side, count: sum, at_least: false }
        } else {
            return None;
        };
        Some(self.digit(label))
    }

    /// Digits whose label, after gaining one more selected neighbour, becomes `digit`.
    /// Only meaningful for labels of the side receiving the new neighbour.
    pub fn predecessors(&self, digit: usize) -> Vec<usize> {
        let l = self.label(digit);
        let sl = self.side(l.side);
        let off = self.side_offset(l.side);
        if l.at_least {
            if sl.ell == 0 {
                vec![digit]
            } else {
                vec![off + sl.ell as usize - 1, digit]
            }
        } else if l.count == 0 {
            Vec::new()
        } else {
            vec![off + l.count as usize - 1]
        }
    }

    pub fn flat_order(&self) -> FlatOrder {
        FlatOrder {
            sigma_low: self.sigma_labels.low,
            sigma_top: self.sigma_labels.top,
            rho_low: self.rho_labels.low,
            rho_top: self.rho_labels.top,
        }
    }

    pub fn is_dominating_set(&self) -> bool {
        *self == Preset::DominatingSet.spec()
    }

    pub fn is_total_dominating_set(&self) -> bool {
        *self == Preset::TotalDominatingSet.spec()
    }

    /// Shape accepted by the specialised dominating-set join: a single sigma label and
    /// rho labels {|0|, |>=1|}.
    pub fn has_dominating_shape(&self) -> bool {
        self.sigma_labels.len() == 1
            && self.rho_labels.top
            && self.rho_labels.ell == 1
    }
}

impl fmt::Display for SigmaRhoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma={} rho={}", self.sigma, self.rho)
    }
}

impl FromStr for SigmaRhoSpec {
    type Err = Error;

    /// Accepts a preset name, optionally with a parameter as in `p_dominating_set(2)`, or an
    /// explicit `sigma=<set> rho=<set>` pair where a set is `0,1`, `cofinite:0` or `N`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('=') {
            let mut sigma = None;
            let mut rho = None;
            for part in s.split_whitespace() {
                let (key, value) = part
                    .split_once('=')
                    .ok_or_else(|| Error::Problem(format!("expected key=value, got '{part}'")))?;
                match key {
                    "sigma" => sigma = Some(value.parse()?),
                    "rho" => rho = Some(value.parse()?),
                    _ => return Err(Error::Problem(format!("unknown key '{key}'"))),
                }
            }
            let sigma = sigma.ok_or_else(|| Error::Problem("missing sigma".into()))?;
            let rho = rho.ok_or_else(|| Error::Problem("missing rho".into()))?;
            return Ok(SigmaRhoSpec::new(sigma, rho));
        }
        let (name, param) = match s.split_once('(') {
            Some((name, rest)) => {
                let p = rest
                    .strip_suffix(')')
                    .and_then(|p| p.trim().parse::<u32>().ok())
                    .ok_or_else(|| Error::Problem(format!("bad parameter in '{s}'")))?;
                (name.trim(), Some(p))
            }
            None => (s, None),
        };
        let preset = Preset::from_name(name, param)?;
        Ok(preset.spec())
    }
}

/// Named problems expressible as [sigma, rho] sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    IndependentSet,
    DominatingSet,
    StrongStableSet,
    PerfectCode,
    IndependentDominatingSet,
    PerfectDominatingSet,
    TotalDominatingSet,
    TotalPerfectDominatingSet,
    NearlyPerfectSet,
    TotalNearlyPerfectSet,
    WeaklyPerfectDominatingSet,
    InducedBoundedDegree(u32),
    PDominatingSet(u32),
    InducedPRegular(u32),
}

impl Preset {
    /// Every preset, with parameterised ones instantiated at `p`.
    pub fn all(p: u32) -> Vec<Preset> {
        use Preset::*;
        vec![
            IndependentSet,
            DominatingSet,
            StrongStableSet,
            PerfectCode,
            IndependentDominatingSet,
            PerfectDominatingSet,
            TotalDominatingSet,
            TotalPerfectDominatingSet,
            NearlyPerfectSet,
            TotalNearlyPerfectSet,
            WeaklyPerfectDominatingSet,
            InducedBoundedDegree(p),
            PDominatingSet(p),
            InducedPRegular(p),
        ]
    }

    pub fn name(&self) -> String {
        use Preset::*;
        match *self {
            IndependentSet => "independent_set".into(),
            DominatingSet => "dominating_set".into(),
            StrongStableSet => "strong_stable_set".into(),
            PerfectCode => "perfect_code".into(),
            IndependentDominatingSet => "independent_dominating_set".into(),
            PerfectDominatingSet => "perfect_dominating_set".into(),
            TotalDominatingSet => "total_dominating_set".into(),
            TotalPerfectDominatingSet => "total_perfect_dominating_set".into(),
            NearlyPerfectSet => "nearly_perfect_set".into(),
            TotalNearlyPerfectSet => "total_nearly_perfect_set".into(),
            WeaklyPerfectDominatingSet => "weakly_perfect_dominating_set".into(),
            InducedBoundedDegree(p) => format!("induced_bounded_degree({p})"),
            PDominatingSet(p) => format!("p_dominating_set({p})"),
            InducedPRegular(p) => format!("induced_p_regular({p})"),
        }
    }

    pub fn from_name(name: &str, param: Option<u32>) -> Result<Self> {
        use Preset::*;
        let need = |p: Option<u32>| {
            p.ok_or_else(|| Error::Problem(format!("preset '{name}' needs a parameter, e.g. {name}(2)")))
        };
        let plain = |preset: Preset| match param {
            None => Ok(preset),
            Some(_) => Err(Error::Problem(format!("preset '{name}' takes no parameter"))),
        };
        match name {
            "independent_set" => plain(IndependentSet),
            "dominating_set" => plain(DominatingSet),
            "strong_stable_set" => plain(StrongStableSet),
            "perfect_code" => plain(PerfectCode),
            "independent_dominating_set" => plain(IndependentDominatingSet),
            "perfect_dominating_set" => plain(PerfectDominatingSet),
            "total_dominating_set" => plain(TotalDominatingSet),
            "total_perfect_dominating_set" => plain(TotalPerfectDominatingSet),
            "nearly_perfect_set" => plain(NearlyPerfectSet),
            "total_nearly_perfect_set" => plain(TotalNearlyPerfectSet),
            "weakly_perfect_dominating_set" => plain(WeaklyPerfectDominatingSet),
            "induced_bounded_degree" => Ok(InducedBoundedDegree(need(param)?)),
            "p_dominating_set" => Ok(PDominatingSet(need(param)?)),
            "induced_p_regular" => Ok(InducedPRegular(need(param)?)),
            _ => Err(Error::Problem(format!("unknown problem '{name}'"))),
        }
    }

    pub fn spec(&self) -> SigmaRhoSpec {
        use Preset::*;
        let n = IntSet::naturals;
        let f = |v: &[u32]| IntSet::finite(v.iter().copied());
        let (sigma, rho) = match *self {
            IndependentSet => (f(&[0]), n()),
            DominatingSet => (n(), IntSet::cofinite([0])),
            StrongStableSet => (f(&[0]), f(&[0, 1])),
            PerfectCode => (f(&[0]), f(&[1])),
            IndependentDominatingSet => (f(&[0]), IntSet::cofinite([0])),
            PerfectDominatingSet => (n(), f(&[1])),
            TotalDominatingSet => (IntSet::cofinite([0]), IntSet::cofinite([0])),
            TotalPerfectDominatingSet => (f(&[1]), f(&[1])),
            NearlyPerfectSet => (n(), f(&[0, 1])),
            TotalNearlyPerfectSet => (f(&[0, 1]), f(&[0, 1])),
            WeaklyPerfectDominatingSet => (f(&[0, 1]), f(&[1])),
            InducedBoundedDegree(p) => (IntSet::finite(0..=p), n()),
            PDominatingSet(p) => (n(), IntSet::cofinite(0..p)),
            InducedPRegular(p) => (f(&[p]), n()),
        };
        SigmaRhoSpec::new(sigma, rho)
    }
}
