use std::fmt;
use std::str::FromStr;

use crate::error::{ensure, Error, Result};

/// Photon counts per optical mode (a Fock basis pattern).
///
/// Rendered compactly as one digit per mode, e.g. `010011000000`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeOccupation(Vec<u32>);

impl ModeOccupation {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self(occupations)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    /// One photon in each of the listed modes.
    pub fn from_modes(modes: usize, occupied: &[usize]) -> Result<Self> {
        let mut occ = vec![0; modes];
        for &i in occupied {
            ensure!(i < modes, Dimension, "mode {i} out of range for {modes} modes");
            occ[i] += 1;
        }
        Ok(Self(occ))
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn photons(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    /// Every mode holds at most one photon.
    pub fn is_collision_free(&self) -> bool {
        self.0.iter().all(|&k| k <= 1)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    /// Mode indices listed with multiplicity, e.g. `(2,0,1)` gives `[0, 0, 2]`.
    pub fn mode_list(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize))
            .collect()
    }

    /// Product of the factorials of the occupations.
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&k| (1..=k).map(f64::from).product::<f64>()).product()
    }
}

impl From<Vec<u32>> for ModeOccupation {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl fmt::Display for ModeOccupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &k in &self.0 {
            match char::from_digit(k, 36) {
                Some(c) => write!(f, "{c}")?,
                None => write!(f, "?")?,
            }
        }
        Ok(())
    }
}

impl FromStr for ModeOccupation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| c.to_digit(36).ok_or_else(|| Error::Parse(format!("bad occupation digit {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

/// All patterns of `photons` bosons over `modes` modes, in lexicographic order.
pub fn all_patterns(modes: usize, photons: usize) -> Vec<ModeOccupation> {
    fn rec(mode: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<ModeOccupation>) {
        if mode + 1 == cur.len() {
            cur[mode] = left;
            out.push(ModeOccupation(cur.clone()));
            return;
        }
        for k in 0..=left {
            cur[mode] = k;
            rec(mode + 1, left - k, cur, out);
        }
    }
    let mut out = Vec::new();
    if modes == 0 {
        if photons == 0 {
            out.push(ModeOccupation(Vec::new()));
        }
        return out;
    }
    rec(0, photons as u32, &mut vec![0; modes], &mut out);
    out
}

/// All collision-free patterns of `photons` over `modes`, in lexicographic order.
pub fn collision_free_patterns(modes: usize, photons: usize) -> Vec<ModeOccupation> {
    all_patterns(modes, photons).into_iter().filter(ModeOccupation::is_collision_free).collect()
}

/// Binomial coefficient as `f64` (exact for the sizes used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}
