//! Generalized Dyck paths and their correspondence with 132-avoiding
//! systems.
//!
//! `Dyck(v, d)` is the set of lattice paths from `(0,0)` to `(d, vd)`
//! built from east and north steps that stay weakly below the line
//! `y = vx`. Three path statistics, namely touchpoints on the line (terminus
//! excluded), north runs followed by an east step, and the greatest
//! vertical gap below the line, transport under the bijection to
//! right-left maxima, descents, and longest increasing subsequence of
//! the associated permutation.

use crate::patterns::contains;
use crate::poly::DescentPoly;
use crate::poset::{Diamond, LabelledSystem, SystemShape};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    East,
    North,
}

impl Step {
    fn as_char(self) -> char {
        match self {
            Step::East => 'E',
            Step::North => 'N',
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DyckError {
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("system contains 132; the bijection is defined on 132-avoiders only")]
    Not132Avoider,
    #[error("the bijection requires a shape of full diamonds")]
    PartialShape,
    #[error("more than {max} paths; raise the budget to enumerate them")]
    TooManyPaths { max: u64 },
}

/// A path of `d` east and `v*d` north steps staying weakly below `y = vx`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticePath {
    v: u32,
    d: u32,
    steps: Vec<Step>,
}

/// The three path statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathStats {
    /// Lattice points of the path on `y = vx`, origin included,
    /// terminus excluded.
    pub touchpoints: u32,
    /// Maximal north runs immediately followed by an east step.
    pub corners: u32,
    /// Greatest vertical distance from the path down from `y = vx`.
    pub height: u32,
}

impl LatticePath {
    pub fn new(v: u32, d: u32, steps: Vec<Step>) -> Result<Self, DyckError> {
        if v < 1 || d < 1 {
            return Err(DyckError::InvalidPath("v and d must be positive".into()));
        }
        let easts = steps.iter().filter(|s| matches!(s, Step::East)).count() as u32;
        let norths = steps.len() as u32 - easts;
        if easts != d || norths != v * d {
            return Err(DyckError::InvalidPath(format!(
                "need {d} east and {} north steps, got {easts} and {norths}",
                v * d
            )));
        }
        let (mut x, mut y) = (0u32, 0u32);
        for s in &steps {
            match s {
                Step::East => x += 1,
                Step::North => y += 1,
            }
            if y > v * x {
                return Err(DyckError::InvalidPath(format!(
                    "path rises above y = {v}x at ({x}, {y})"
                )));
            }
        }
        Ok(LatticePath { v, d, steps })
    }

    pub fn parse(v: u32, d: u32, s: &str) -> Result<Self, DyckError> {
        let steps = s
            .chars()
            .map(|c| match c {
                'E' | 'e' => Ok(Step::East),
                'N' | 'n' => Ok(Step::North),
                other => Err(DyckError::InvalidPath(format!("unexpected step {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(v, d, steps)
    }

    /// Rebuilds a path from the heights of its east steps (the number of
    /// north steps taken before each one).
    pub fn from_east_heights(v: u32, d: u32, heights: &[u32]) -> Result<Self, DyckError> {
        if heights.len() as u32 != d {
            return Err(DyckError::InvalidPath(format!(
                "need {d} east heights, got {}",
                heights.len()
            )));
        }
        let mut steps = Vec::with_capacity((v * d + d) as usize);
        let mut current = 0u32;
        for (k, &h) in heights.iter().enumerate() {
            if h < current || h > v * k as u32 {
                return Err(DyckError::InvalidPath(format!(
                    "east height {h} is impossible at step {}",
                    k + 1
                )));
            }
            steps.extend(std::iter::repeat_n(Step::North, (h - current) as usize));
            steps.push(Step::East);
            current = h;
        }
        steps.extend(std::iter::repeat_n(Step::North, (v * d - current) as usize));
        Self::new(v, d, steps)
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn step_string(&self) -> String {
        self.steps.iter().map(|s| s.as_char()).collect()
    }

    pub fn east_heights(&self) -> Vec<u32> {
        let mut heights = Vec::with_capacity(self.d as usize);
        let mut y = 0;
        for s in &self.steps {
            match s {
                Step::East => heights.push(y),
                Step::North => y += 1,
            }
        }
        heights
    }

    pub fn statistics(&self) -> PathStats {
        let v = self.v;
        let (mut x, mut y) = (0u32, 0u32);
        let mut touchpoints = 1; // the origin
        let mut height = 0;
        for (i, s) in self.steps.iter().enumerate() {
            match s {
                Step::East => x += 1,
                Step::North => y += 1,
            }
            let terminal = i + 1 == self.steps.len();
            if !terminal && y == v * x {
                touchpoints += 1;
            }
            height = height.max(v * x - y);
        }
        let corners = self
            .steps
            .windows(2)
            .filter(|w| matches!(w, [Step::North, Step::East]))
            .count() as u32;
        PathStats {
            touchpoints,
            corners,
            height,
        }
    }
}

impl fmt::Display for LatticePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.step_string())
    }
}

/// All paths of `Dyck(v, d)` in lexicographic order of their step
/// strings (`E` before `N`); their number is the Fuss-Catalan count.
pub fn enumerate_paths(v: u32, d: u32, cap: u64) -> Result<Vec<LatticePath>, DyckError> {
    let mut out = Vec::new();
    let mut steps = Vec::with_capacity((v * d + d) as usize);
    fn rec(
        v: u32,
        d: u32,
        easts: u32,
        norths: u32,
        steps: &mut Vec<Step>,
        out: &mut Vec<LatticePath>,
        cap: u64,
    ) -> Result<(), DyckError> {
        if easts == d && norths == v * d {
            if out.len() as u64 >= cap {
                return Err(DyckError::TooManyPaths { max: cap });
            }
            out.push(LatticePath {
                v,
                d,
                steps: steps.clone(),
            });
            return Ok(());
        }
        if easts < d {
            steps.push(Step::East);
            rec(v, d, easts + 1, norths, steps, out, cap)?;
            steps.pop();
        }
        if norths < v * easts {
            steps.push(Step::North);
            rec(v, d, easts, norths + 1, steps, out, cap)?;
            steps.pop();
        }
        Ok(())
    }
    rec(v, d, 0, 0, &mut steps, &mut out, cap)?;
    Ok(out)
}

/// Distribution of the corner statistic over `Dyck(v, d)` as a
/// polynomial in `x`; by the bijection this equals the descent
/// generating function of the 132-avoiders. `None` when more than `cap`
/// paths exist.
pub fn corners_distribution(v: u32, d: u32, cap: u64) -> Option<DescentPoly> {
    struct Walk {
        v: u32,
        d: u32,
        cap: u64,
        seen: u64,
        coeffs: Vec<u64>,
    }
    impl Walk {
        fn rec(&mut self, easts: u32, norths: u32, last_was_north: bool, corners: usize) -> bool {
            if easts == self.d && norths == self.v * self.d {
                if self.seen >= self.cap {
                    return false;
                }
                self.seen += 1;
                if self.coeffs.len() <= corners {
                    self.coeffs.resize(corners + 1, 0);
                }
                self.coeffs[corners] += 1;
                return true;
            }
            if easts < self.d {
                let corners = corners + usize::from(last_was_north);
                if !self.rec(easts + 1, norths, false, corners) {
                    return false;
                }
            }
            if norths < self.v * easts && !self.rec(easts, norths + 1, true, corners) {
                return false;
            }
            true
        }
    }
    let mut walk = Walk {
        v,
        d,
        cap,
        seen: 0,
        coeffs: Vec::new(),
    };
    walk.rec(0, 0, false, 0)
        .then(|| DescentPoly::from_u64_coeffs(&walk.coeffs))
}

/// The bijection from paths to 132-avoiding systems.
///
/// East-step heights are grouped into maximal runs of equal height; the
/// run order is reversed and each height bumped by one. A run of length
/// `m` at height `h` becomes a block of `m` consecutive diamonds whose
/// first label is `h + 1` and whose remaining `v*m - 1` labels are the
/// smallest unused labels greater than `h + 1`, taken in increasing
/// order across the block.
pub fn phi_map(path: &LatticePath) -> LabelledSystem {
    let v = path.v;
    let d = path.d;
    let n = v * d;
    let heights = path.east_heights();
    let mut runs: Vec<(u32, u32)> = Vec::new();
    for h in heights {
        match runs.last_mut() {
            Some((height, mult)) if *height == h => *mult += 1,
            _ => runs.push((h, 1)),
        }
    }
    let mut unused = vec![true; n as usize + 1];
    let mut diamonds = Vec::with_capacity(d as usize);
    for &(h, mult) in runs.iter().rev() {
        let first = h + 1;
        debug_assert!(unused[first as usize], "block first label already used");
        unused[first as usize] = false;
        let mut labels = Vec::with_capacity((v * mult) as usize);
        labels.push(first);
        let mut candidate = first + 1;
        while labels.len() < (v * mult) as usize {
            debug_assert!(candidate <= n, "ran out of labels above {first}");
            if unused[candidate as usize] {
                unused[candidate as usize] = false;
                labels.push(candidate);
            }
            candidate += 1;
        }
        for chunk in labels.chunks_exact(v as usize) {
            diamonds.push(Diamond {
                bottom: chunk[0],
                middles: chunk[1..v as usize - 1].to_vec(),
                top: chunk[v as usize - 1],
            });
        }
    }
    let shape = SystemShape::full(v, d).expect("path shapes are valid");
    LabelledSystem::new(shape, diamonds, None).expect("the image of a path is a valid system")
}

/// Inverse of `phi_map`: reads off the first label of each diamond,
/// repeating the block's first label whenever the labels increase from
/// one diamond to the next, then reverses the list and drops each entry
/// by one to recover the east-step heights.
pub fn phi_inverse(system: &LabelledSystem) -> Result<LatticePath, DyckError> {
    if system.partial().is_some() {
        return Err(DyckError::PartialShape);
    }
    let perm = system.associated_permutation();
    if contains(perm.values(), &"132".parse().expect("valid pattern")) {
        return Err(DyckError::Not132Avoider);
    }
    let shape = system.shape();
    let firsts: Vec<u32> = system.diamonds().iter().map(|dia| dia.bottom).collect();
    let mut entries = Vec::with_capacity(firsts.len());
    let mut block_first = firsts[0];
    for (i, &f) in firsts.iter().enumerate() {
        if i == 0 || f < firsts[i - 1] {
            block_first = f;
        }
        entries.push(block_first);
    }
    entries.reverse();
    let heights: Vec<u32> = entries.into_iter().map(|e| e - 1).collect();
    LatticePath::from_east_heights(shape.v(), shape.full_count(), &heights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{collect_avoiders, Budget};
    use crate::patterns::PatternSet;
    use std::collections::BTreeSet;

    fn heights_path(v: u32, d: u32, hs: &[u32]) -> LatticePath {
        LatticePath::from_east_heights(v, d, hs).unwrap()
    }

    #[test]
    fn path_validation() {
        assert!(LatticePath::parse(4, 1, "ENNNN").is_ok());
        assert!(LatticePath::parse(4, 1, "NENNN").is_err()); // rises above the line
        assert!(LatticePath::parse(4, 1, "ENNN").is_err()); // wrong step count
        assert!(LatticePath::from_east_heights(4, 2, &[0, 5]).is_err());
        assert!(LatticePath::from_east_heights(4, 2, &[2, 1]).is_err());
    }

    #[test]
    fn enumerates_all_paths() {
        let one = enumerate_paths(4, 1, 1 << 20).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].step_string(), "ENNNN");
        assert_eq!(enumerate_paths(4, 2, 1 << 20).unwrap().len(), 5);
        assert_eq!(enumerate_paths(5, 2, 1 << 20).unwrap().len(), 6);
        // lexicographic with E < N
        let paths = enumerate_paths(4, 2, 1 << 20).unwrap();
        let strings: Vec<String> = paths.iter().map(LatticePath::step_string).collect();
        let mut sorted = strings.clone();
        sorted.sort();
        assert_eq!(strings, sorted);
        assert_eq!(
            enumerate_paths(4, 4, 2).unwrap_err(),
            DyckError::TooManyPaths { max: 2 }
        );
    }

    #[test]
    fn statistics_of_worked_paths() {
        let p = heights_path(4, 4, &[0, 4, 5, 12]);
        assert_eq!(
            p.statistics(),
            PathStats {
                touchpoints: 3,
                corners: 3,
                height: 7
            }
        );
        // all easts first: touches only at the origin, no corner, full gap
        let staircase = heights_path(4, 4, &[0, 0, 0, 0]);
        assert_eq!(
            staircase.statistics(),
            PathStats {
                touchpoints: 1,
                corners: 0,
                height: 16
            }
        );
        let p2 = heights_path(4, 4, &[0, 3, 3, 10]);
        assert_eq!(
            p2.statistics(),
            PathStats {
                touchpoints: 1,
                corners: 2,
                height: 9
            }
        );
    }

    #[test]
    fn phi_maps_the_worked_examples() {
        let p = heights_path(4, 4, &[0, 4, 5, 12]);
        assert_eq!(
            phi_map(&p).associated_permutation().values(),
            &[13, 14, 15, 16, 6, 7, 8, 9, 5, 10, 11, 12, 1, 2, 3, 4]
        );
        // the run of equal heights spans one block of two diamonds
        let p2 = heights_path(4, 4, &[0, 3, 3, 10]);
        assert_eq!(
            phi_map(&p2).associated_permutation().values(),
            &[11, 12, 13, 14, 4, 5, 6, 7, 8, 9, 10, 15, 1, 2, 3, 16]
        );
        let staircase = heights_path(4, 4, &[0, 0, 0, 0]);
        assert_eq!(
            phi_map(&staircase).associated_permutation().values(),
            (1..=16).collect::<Vec<u32>>().as_slice()
        );
    }

    #[test]
    fn phi_inverse_recovers_east_heights() {
        let worked = [vec![0, 4, 5, 12], vec![0, 3, 3, 10], vec![0, 0, 0, 0]];
        for hs in &worked {
            let p = heights_path(4, 4, hs);
            let sys = phi_map(&p);
            let back = phi_inverse(&sys).unwrap();
            assert_eq!(back.east_heights(), *hs);
            assert_eq!(back, p);
        }
    }

    #[test]
    fn phi_inverse_rejects_non_avoiders() {
        let sys =
            LabelledSystem::from_reading_labels(SystemShape::full(4, 1).unwrap(), &[1, 3, 2, 4])
                .unwrap();
        assert_eq!(phi_inverse(&sys).unwrap_err(), DyckError::Not132Avoider);
    }

    #[test]
    fn bijection_onto_small_avoider_sets() {
        for (v, d) in [(4, 1), (4, 2), (5, 2)] {
            let paths = enumerate_paths(v, d, 1 << 20).unwrap();
            let avoiders = collect_avoiders(
                &SystemShape::full(v, d).unwrap(),
                &"132".parse::<PatternSet>().unwrap(),
                &Budget::default(),
            )
            .unwrap();
            let images: BTreeSet<_> = paths
                .iter()
                .map(|p| phi_map(p).associated_permutation().values().to_vec())
                .collect();
            let expected: BTreeSet<_> = avoiders
                .iter()
                .map(|s| s.associated_permutation().values().to_vec())
                .collect();
            assert_eq!(images.len(), paths.len(), "injective at ({v},{d})");
            assert_eq!(images, expected, "image is the avoider set at ({v},{d})");
            for p in &paths {
                let sys = phi_map(p);
                assert_eq!(&phi_inverse(&sys).unwrap(), p);
                // pointwise statistic transport
                let stats = p.statistics();
                let perm = sys.associated_permutation();
                assert_eq!(stats.touchpoints as usize, perm.rlmax());
                assert_eq!(stats.corners as usize, perm.descents());
                assert_eq!(stats.height as usize, perm.lis());
            }
        }
    }

    #[test]
    fn corner_distribution_matches_path_walk() {
        let paths = enumerate_paths(4, 2, 1 << 20).unwrap();
        let mut coeffs = vec![0u64; 8];
        for p in &paths {
            coeffs[p.statistics().corners as usize] += 1;
        }
        assert_eq!(
            corners_distribution(4, 2, 1 << 20).unwrap(),
            DescentPoly::from_u64_coeffs(&coeffs)
        );
        assert_eq!(
            corners_distribution(4, 2, 1 << 20).unwrap(),
            DescentPoly::from_u64_coeffs(&[1, 4])
        );
        assert_eq!(corners_distribution(4, 4, 2), None);
    }
}
