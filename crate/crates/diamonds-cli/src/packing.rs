//! Packing schedules: one object per diamond, heaviest first.
//!
//! Each object's `task_times` are the global step indices at which its
//! tasks execute: the first entry starts the object's retrieval, the
//! last picks it, and the middle entries are the unordered interior
//! tasks. Avoiding both 231 and 321 in the read-off permutation is a
//! sufficient (not necessary) condition that no heavier object is ever
//! placed on top of a lighter one.

use diamonds::patterns::reduce;
use diamonds::poset::{Diamond, LabelledSystem, PartialDiamond, SystemShape};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Deserialize)]
pub struct ScheduleFile {
    pub objects: Vec<ScheduleObject>,
}

#[derive(Debug, Deserialize)]
pub struct ScheduleObject {
    pub weight: f64,
    pub task_times: Vec<u32>,
}

#[derive(Debug, PartialEq, Eq)]
pub enum Verdict {
    Safe,
    Unsafe {
        pattern: &'static str,
        /// 1-based positions in the schedule's permutation.
        positions: [usize; 3],
        values: [u32; 3],
    },
}

pub fn load(path: &Path) -> Result<ScheduleFile, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad schedule JSON: {e}"))
}

/// Builds the labelled system: objects become diamonds in the given
/// order, which must be strictly decreasing in weight. A final object
/// with fewer tasks than the rest becomes a partial diamond.
pub fn to_system(schedule: &ScheduleFile) -> Result<LabelledSystem, String> {
    let objects = &schedule.objects;
    if objects.is_empty() {
        return Err("the schedule has no objects".into());
    }
    for pair in objects.windows(2) {
        let (a, b) = (pair[0].weight, pair[1].weight);
        if a.partial_cmp(&b) != Some(std::cmp::Ordering::Greater) {
            return Err(format!(
                "objects must be listed in strictly decreasing weight ({a} then {b})"
            ));
        }
    }
    let v = objects[0].task_times.len();
    if v < 3 {
        return Err(format!(
            "the first object needs at least 3 tasks to form a diamond, got {v}"
        ));
    }
    let mut diamonds = Vec::new();
    let mut partial: Option<PartialDiamond> = None;
    for (i, obj) in objects.iter().enumerate() {
        let times = &obj.task_times;
        if times.len() == v {
            diamonds.push(Diamond {
                bottom: times[0],
                middles: times[1..v - 1].to_vec(),
                top: times[v - 1],
            });
        } else if i + 1 == objects.len() && !times.is_empty() && times.len() < v {
            partial = Some(PartialDiamond {
                bottom: times[0],
                middles: times[1..].to_vec(),
            });
        } else {
            return Err(format!(
                "object {} has {} tasks; expected {v} (or fewer for a trailing partial object)",
                i + 1,
                times.len()
            ));
        }
    }
    let shape = SystemShape::new(
        v as u32,
        diamonds.len() as u32,
        partial.as_ref().map(|p| p.middles.len() as u32 + 1),
    )
    .map_err(|e| e.to_string())?;
    LabelledSystem::new(shape, diamonds, partial)
        .map_err(|e| format!("schedule violates the task ordering: {e}"))
}

/// The sufficient-condition check: the first 231 or 321 occurrence in
/// lexicographic index order, if any.
pub fn check(system: &LabelledSystem) -> Verdict {
    let perm = system.associated_permutation();
    let seq = perm.values();
    let n = seq.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let triple = [seq[i], seq[j], seq[k]];
                let pattern = match reduce(&triple).expect("distinct entries").values() {
                    [2, 3, 1] => Some("231"),
                    [3, 2, 1] => Some("321"),
                    _ => None,
                };
                if let Some(pattern) = pattern {
                    return Verdict::Unsafe {
                        pattern,
                        positions: [i + 1, j + 1, k + 1],
                        values: triple,
                    };
                }
            }
        }
    }
    Verdict::Safe
}

#[cfg(test)]
mod tests {
    use super::*;
    use diamonds::patterns::avoids_all;
    use proptest::prelude::*;

    fn schedule(objects: Vec<(f64, Vec<u32>)>) -> ScheduleFile {
        ScheduleFile {
            objects: objects
                .into_iter()
                .map(|(weight, task_times)| ScheduleObject { weight, task_times })
                .collect(),
        }
    }

    #[test]
    fn three_robot_example_is_unsafe() {
        let s = schedule(vec![
            (3.0, vec![2, 10, 5, 11]),
            (2.0, vec![4, 6, 8, 12]),
            (1.0, vec![1, 7, 3, 9]),
        ]);
        let system = to_system(&s).unwrap();
        assert_eq!(
            check(&system),
            Verdict::Unsafe {
                pattern: "231",
                positions: [1, 2, 9],
                values: [2, 10, 1],
            }
        );
    }

    #[test]
    fn sequential_schedule_is_safe() {
        let s = schedule(vec![(2.0, vec![1, 2, 3, 4]), (1.0, vec![5, 6, 7, 8])]);
        assert_eq!(check(&to_system(&s).unwrap()), Verdict::Safe);
    }

    #[test]
    fn deferred_first_pick_is_still_safe() {
        // permutation 1 2 3 8 4 5 6 7 avoids both hazard patterns
        let s = schedule(vec![(2.0, vec![1, 2, 3, 8]), (1.0, vec![4, 5, 6, 7])]);
        assert_eq!(check(&to_system(&s).unwrap()), Verdict::Safe);
    }

    #[test]
    fn rejects_malformed_schedules() {
        // tie in weight
        let tie = schedule(vec![(1.0, vec![1, 2, 3, 4]), (1.0, vec![5, 6, 7, 8])]);
        assert!(to_system(&tie).is_err());
        // times are not a permutation
        let dup = schedule(vec![(2.0, vec![1, 2, 3, 3]), (1.0, vec![5, 6, 7, 8])]);
        assert!(to_system(&dup).is_err());
        // pick before an interior task
        let order = schedule(vec![(2.0, vec![1, 4, 3, 2]), (1.0, vec![5, 6, 7, 8])]);
        assert!(to_system(&order).is_err());
        // short object in the middle
        let short = schedule(vec![
            (3.0, vec![1, 2, 3, 4]),
            (2.0, vec![5, 6]),
            (1.0, vec![7, 8, 9, 10]),
        ]);
        assert!(to_system(&short).is_err());
        // trailing short object is fine
        let partial = schedule(vec![(2.0, vec![1, 2, 3, 4]), (1.0, vec![5, 6])]);
        assert!(to_system(&partial).is_ok());
    }

    /// Random valid schedules: slice a shuffled label sequence into
    /// diamonds, forcing each object's first task earliest and pick last.
    fn arb_schedule() -> impl Strategy<Value = ScheduleFile> {
        (1usize..4, 3usize..6).prop_flat_map(|(d, v)| {
            Just((1..=(d * v) as u32).collect::<Vec<u32>>())
                .prop_shuffle()
                .prop_map(move |labels| {
                    let objects = labels
                        .chunks_exact(v)
                        .enumerate()
                        .map(|(i, chunk)| {
                            let mut sorted = chunk.to_vec();
                            sorted.sort_unstable();
                            let mut times = vec![sorted[0]];
                            times.extend(
                                chunk
                                    .iter()
                                    .filter(|&&t| t != sorted[0] && t != sorted[v - 1]),
                            );
                            times.push(sorted[v - 1]);
                            ScheduleObject {
                                weight: (10 * (i + 1)) as f64 / -1.0 + 100.0,
                                task_times: times,
                            }
                        })
                        .collect();
                    ScheduleFile { objects }
                })
        })
    }

    proptest! {
        #[test]
        fn verdict_matches_avoidance(s in arb_schedule()) {
            let system = to_system(&s).unwrap();
            let perm = system.associated_permutation();
            let hazard: diamonds::patterns::PatternSet = "231:321".parse().unwrap();
            let safe = avoids_all(perm.values(), &hazard);
            prop_assert_eq!(matches!(check(&system), Verdict::Safe), safe);
        }
    }
}
