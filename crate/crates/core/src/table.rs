use crate::problem::{Label, SigmaRhoSpec};

/// Assignment of a label digit to every bag vertex, in bag order.
pub type StateColouring = Vec<usize>;

/// DP table of one node: a value for every colouring of the sorted bag. Colourings are
/// numbered in base `s` with the first bag vertex as the most significant digit.
#[derive(Clone, Debug, PartialEq)]
pub struct MemoTable<V> {
    pub bag: Vec<usize>,
    pub s: usize,
    pub values: Vec<V>,
}

impl<V: Copy> MemoTable<V> {
    pub fn filled(bag: Vec<usize>, s: usize, value: V) -> Self {
        let len = s.pow(bag.len() as u32);
        MemoTable { bag, s, values: vec![value; len] }
    }

    pub fn k(&self) -> usize {
        self.bag.len()
    }

    pub fn index(&self, colouring: &[usize]) -> usize {
        encode(colouring, self.s)
    }

    pub fn colouring(&self, index: usize) -> StateColouring {
        decode(index, self.s, self.k())
    }

    pub fn get(&self, colouring: &[usize]) -> V {
        self.values[self.index(colouring)]
    }

    pub fn labelled(&self, spec: &SigmaRhoSpec, index: usize) -> Vec<Label> {
        self.colouring(index).into_iter().map(|d| spec.label(d)).collect()
    }
}

pub fn encode(colouring: &[usize], s: usize) -> usize {
    colouring.iter().fold(0, |acc, &d| acc * s + d)
}

pub fn decode(mut index: usize, s: usize, k: usize) -> StateColouring {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = index % s;
        index /= s;
    }
    out
}
