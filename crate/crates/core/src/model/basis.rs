//! Uncoupled exciton-photon product states up to the second rung.

use std::fmt;

use crate::error::{Error, Result};

/// Occupation tuple `|n_X1, …, n_XN; n_C⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub excitons: Vec<u8>,
    pub photons: u8,
}

impl BasisState {
    pub fn excitation_number(&self) -> usize {
        self.excitons.iter().map(|&n| n as usize).sum::<usize>() + self.photons as usize
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let xs: Vec<String> = self.excitons.iter().map(|n| n.to_string()).collect();
        write!(f, "|{};{}⟩", xs.join(","), self.photons)
    }
}

/// Ordered truncated basis: ground state, first rung, second rung.
///
/// Within a rung, photon-rich states come first; the first rung lists the
/// one-photon state and then single excitons; the second rung lists the
/// two-photon state, photon-plus-exciton states and then exciton pairs in
/// lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderBasis {
    n_emitters: usize,
    states: Vec<BasisState>,
}

impl LadderBasis {
    pub fn new(n_emitters: usize) -> Result<Self> {
        if n_emitters == 0 {
            return Err(Error::InvalidParams("basis needs at least one emitter".into()));
        }
        let n = n_emitters;
        let empty = vec![0u8; n];
        let with = |idx: &[usize], photons: u8| {
            let mut x = empty.clone();
            idx.iter().for_each(|&i| x[i] = 1);
            BasisState { excitons: x, photons }
        };
        let mut states = vec![with(&[], 0), with(&[], 1)];
        states.extend((0..n).map(|i| with(&[i], 0)));
        states.push(with(&[], 2));
        states.extend((0..n).map(|i| with(&[i], 1)));
        for i in 0..n {
            for j in i + 1..n {
                states.push(with(&[i, j], 0));
            }
        }
        Ok(Self { n_emitters, states })
    }

    pub fn n_emitters(&self) -> usize {
        self.n_emitters
    }

    /// Number of first-rung states, `1 + N`.
    pub fn n1(&self) -> usize {
        1 + self.n_emitters
    }

    /// Number of second-rung states, `1 + N(N+1)/2`.
    pub fn n2(&self) -> usize {
        1 + self.n_emitters * (self.n_emitters + 1) / 2
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn rung_of(&self, index: usize) -> usize {
        self.states[index].excitation_number()
    }

    /// Index range of rung `r` (0, 1 or 2).
    pub fn rung_range(&self, rung: usize) -> std::ops::Range<usize> {
        match rung {
            0 => 0..1,
            1 => 1..1 + self.n1(),
            2 => 1 + self.n1()..self.len(),
            _ => panic!("rung {rung} is outside the truncated ladder"),
        }
    }

    pub fn index_of(&self, state: &BasisState) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }

    /// Number of ground↔rung-1 plus rung-1↔rung-2 transitions, `N1(1 + N2)`.
    pub fn n_transitions(&self) -> usize {
        self.n1() * (1 + self.n2())
    }

    /// Index of the exciton-pair state `(i, j)` within the second rung, `i < j`.
    pub(crate) fn pair_offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n_emitters);
        let n = self.n_emitters;
        // pairs before row i: sum_{r<i} (n-1-r)
        let before: usize = (0..i).map(|r| n - 1 - r).sum();
        1 + n + before + (j - i - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force enumeration of all occupation tuples with total excitation ≤ 2.
    fn enumerate(n: usize) -> Vec<BasisState> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            for photons in 0u8..=2 {
                let excitons: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
                let s = BasisState { excitons, photons };
                if s.excitation_number() <= 2 {
                    out.push(s);
                }
            }
        }
        out
    }

    #[test]
    fn three_emitter_order() {
        let b = LadderBasis::new(3).unwrap();
        let expected = [
            ([0, 0, 0], 0),
            ([0, 0, 0], 1),
            ([1, 0, 0], 0),
            ([0, 1, 0], 0),
            ([0, 0, 1], 0),
            ([0, 0, 0], 2),
            ([1, 0, 0], 1),
            ([0, 1, 0], 1),
            ([0, 0, 1], 1),
            ([1, 1, 0], 0),
            ([1, 0, 1], 0),
            ([0, 1, 1], 0),
        ];
        assert_eq!(b.len(), 12);
        for (s, (x, c)) in b.states().iter().zip(expected) {
            assert_eq!(s.excitons, x.to_vec());
            assert_eq!(s.photons, c);
        }
        assert_eq!(b.to_string_list()[0], "|0,0,0;0⟩");
    }

    #[test]
    fn single_emitter_order() {
        let b = LadderBasis::new(1).unwrap();
        let got: Vec<(u8, u8)> = b.states().iter().map(|s| (s.excitons[0], s.photons)).collect();
        assert_eq!(got, vec![(0, 0), (0, 1), (1, 0), (0, 2), (1, 1)]);
    }

    #[test]
    fn counts_match_enumeration() {
        for n in 1..=6 {
            let b = LadderBasis::new(n).unwrap();
            let brute = enumerate(n);
            assert_eq!(b.len(), brute.len(), "N={n}");
            assert_eq!(b.len(), 1 + (1 + n) + (1 + n * (n + 1) / 2));
            for s in &brute {
                assert!(b.index_of(s).is_some());
            }
            for (i, s) in b.states().iter().enumerate() {
                assert_eq!(b.rung_of(i), s.excitation_number());
                let r = s.excitation_number();
                assert!(b.rung_range(r).contains(&i));
            }
        }
        assert_eq!(LadderBasis::new(2).unwrap().len(), 8);
    }

    #[test]
    fn transition_counts() {
        assert_eq!(LadderBasis::new(3).unwrap().n_transitions(), 32);
        assert_eq!(LadderBasis::new(1).unwrap().n_transitions(), 6);
        assert_eq!(LadderBasis::new(2).unwrap().n_transitions(), 15);
    }

    #[test]
    fn pair_offsets_follow_listing() {
        let b = LadderBasis::new(4).unwrap();
        let r2 = b.rung_range(2);
        for i in 0..4 {
            for j in i + 1..4 {
                let s = &b.states()[r2.start + b.pair_offset(i, j)];
                assert_eq!(s.photons, 0);
                assert_eq!(s.excitons[i], 1);
                assert_eq!(s.excitons[j], 1);
            }
        }
    }

    #[test]
    fn zero_emitters_rejected() {
        assert!(LadderBasis::new(0).is_err());
    }

    impl LadderBasis {
        fn to_string_list(&self) -> Vec<String> {
            self.states.iter().map(|s| s.to_string()).collect()
        }
    }
}
