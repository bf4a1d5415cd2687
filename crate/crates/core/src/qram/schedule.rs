use std::collections::BTreeMap;

use serde::Serialize;

use super::layout::TreeLayout;
use super::QramSpec;
use crate::error::QramError;

/// One time-step operation of the data-fetch stage. `word` is a data bus
/// index; `layer` is the parent layer of a Routing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum PipelineOp {
    Load {
        word: usize,
    },
    RouteDown {
        word: usize,
        layer: usize,
    },
    Memory {
        word: usize,
    },
    RouteUp {
        word: usize,
        layer: usize,
    },
    Unload {
        word: usize,
    },
    /// `up` leaves the child while `down` enters it.
    Bidirectional {
        up: usize,
        down: usize,
        layer: usize,
    },
    /// `out` returns to its bus wire and `into` takes the root in the same
    /// step (only at `n = 1` or when two words are exactly `n` apart).
    Handoff {
        out: usize,
        into: usize,
    },
}

impl PipelineOp {
    pub fn wires(&self, layout: &TreeLayout) -> Vec<usize> {
        let root = layout.node_data(0, 0);
        match *self {
            PipelineOp::Load { word } | PipelineOp::Unload { word } => {
                vec![layout.data_bus(word), root]
            }
            PipelineOp::Handoff { out, into } => {
                vec![layout.data_bus(out), layout.data_bus(into), root]
            }
            PipelineOp::RouteDown { layer, .. }
            | PipelineOp::RouteUp { layer, .. }
            | PipelineOp::Bidirectional { layer, .. } => layout.routing_wires(layer),
            PipelineOp::Memory { .. } => layout.leaf_wires(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineSchedule {
    pub n: usize,
    pub words: Vec<usize>,
    pub pipelined: bool,
    pub steps: Vec<Vec<PipelineOp>>,
}

impl PipelineSchedule {
    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }

    /// Number of `R_up` / `R_down` pairs fused into bidirectional Routings.
    pub fn merged_pairs(&self) -> usize {
        self.ops()
            .filter(|op| matches!(op, PipelineOp::Bidirectional { .. }))
            .count()
    }

    pub fn handoffs(&self) -> usize {
        self.ops()
            .filter(|op| matches!(op, PipelineOp::Handoff { .. }))
            .count()
    }

    pub fn ops(&self) -> impl Iterator<Item = &PipelineOp> {
        self.steps.iter().flatten()
    }

    /// Aligned text listing, one step per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (t, ops) in self.steps.iter().enumerate() {
            let names: Vec<String> = ops
                .iter()
                .map(|op| match *op {
                    PipelineOp::Load { word } => format!("D{word}"),
                    PipelineOp::Unload { word } => format!("D{word}^-1"),
                    PipelineOp::RouteDown { word, layer } => {
                        format!("Rdown({layer},{})[{word}]", layer + 1)
                    }
                    PipelineOp::RouteUp { word, layer } => {
                        format!("Rup({layer},{})[{word}]", layer + 1)
                    }
                    PipelineOp::Memory { word } => format!("M{word}"),
                    PipelineOp::Bidirectional { up, down, layer } => {
                        format!("Routing({layer},{})[{up}^,{down}v]", layer + 1)
                    }
                    PipelineOp::Handoff { out, into } => format!("D{out}^-1+D{into}"),
                })
                .collect();
            s.push_str(&format!("{t:>4}  {}\n", names.join("  ")));
        }
        s
    }
}

/// Schedules the fetch of the listed data words (strictly increasing bus
/// indices). Pipelined, a word starts `2 * gap` steps after its predecessor
/// when `gap <= n`, otherwise one full fetch (`2n + 1` steps) later.
pub fn schedule_words(
    n: usize,
    words: &[usize],
    pipelined: bool,
) -> Result<PipelineSchedule, QramError> {
    if n == 0 {
        return Err(QramError::InvalidSpec("n must be at least 1".into()));
    }
    if words.windows(2).any(|w| w[0] >= w[1]) {
        return Err(QramError::InvalidSpec(
            "words must be strictly increasing".into(),
        ));
    }
    let span = 2 * n + 1;
    let mut events: BTreeMap<usize, Vec<PipelineOp>> = BTreeMap::new();
    let mut start = 0;
    for (i, &w) in words.iter().enumerate() {
        if i > 0 {
            let gap = w - words[i - 1];
            start += if pipelined && gap <= n { 2 * gap } else { span };
        }
        let mut at = |t: usize, op| events.entry(start + t).or_default().push(op);
        at(0, PipelineOp::Load { word: w });
        for a in 0..n - 1 {
            at(1 + a, PipelineOp::RouteDown { word: w, layer: a });
            at(2 * n - 1 - a, PipelineOp::RouteUp { word: w, layer: a });
        }
        at(n, PipelineOp::Memory { word: w });
        at(2 * n, PipelineOp::Unload { word: w });
    }
    let n_steps = events.keys().next_back().map_or(0, |t| t + 1);
    let mut steps = vec![Vec::new(); n_steps];
    for (t, ops) in events {
        steps[t] = merge_step(ops);
    }
    Ok(PipelineSchedule {
        n,
        words: words.to_vec(),
        pipelined,
        steps,
    })
}

fn merge_step(mut ops: Vec<PipelineOp>) -> Vec<PipelineOp> {
    let mut out = Vec::with_capacity(ops.len());
    while let Some(op) = ops.pop() {
        let partner = ops.iter().position(|other| match (op, *other) {
            (PipelineOp::RouteUp { layer: a, .. }, PipelineOp::RouteDown { layer: b, .. })
            | (PipelineOp::RouteDown { layer: a, .. }, PipelineOp::RouteUp { layer: b, .. }) => {
                a == b
            }
            (PipelineOp::Unload { .. }, PipelineOp::Load { .. })
            | (PipelineOp::Load { .. }, PipelineOp::Unload { .. }) => true,
            _ => false,
        });
        let Some(i) = partner else {
            out.push(op);
            continue;
        };
        let other = ops.remove(i);
        out.push(match (op, other) {
            (PipelineOp::RouteUp { word: up, layer }, PipelineOp::RouteDown { word: down, .. })
            | (PipelineOp::RouteDown { word: down, layer }, PipelineOp::RouteUp { word: up, .. }) => {
                PipelineOp::Bidirectional { up, down, layer }
            }
            (PipelineOp::Unload { word: out }, PipelineOp::Load { word: into })
            | (PipelineOp::Load { word: into }, PipelineOp::Unload { word: out }) => {
                PipelineOp::Handoff { out, into }
            }
            _ => unreachable!("partner search only pairs mergeable ops"),
        });
    }
    out.reverse();
    out
}

/// Fetch schedule for all `k` words of `spec`.
pub fn pipeline_schedule(spec: &QramSpec) -> Result<PipelineSchedule, QramError> {
    let words: Vec<usize> = (0..spec.k).collect();
    schedule_words(spec.n, &words, spec.pipeline)
}

/// Merged pair count for `k` consecutive words, piecewise in `k` vs `n`.
pub fn merged_pairs_closed_form(n: usize, k: usize) -> usize {
    if k <= n {
        k * (k - 1) / 2
    } else {
        n * (n - 1) / 2 + (k - n) * (n - 1)
    }
}

/// Step count for `k` consecutive words.
pub fn pipeline_steps_closed_form(n: usize, k: usize, pipelined: bool) -> usize {
    if pipelined {
        2 * n + 1 + 2 * (k - 1)
    } else {
        (2 * n + 1) * k
    }
}

/// `(step, wire)` for every wire touched by two operations of one step.
pub fn find_conflicts(schedule: &PipelineSchedule, layout: &TreeLayout) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (t, ops) in schedule.steps.iter().enumerate() {
        let mut seen = std::collections::BTreeSet::new();
        for op in ops {
            for w in op.wires(layout) {
                if !seen.insert(w) {
                    out.push((t, w));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consecutive(n: usize, k: usize) -> PipelineSchedule {
        schedule_words(n, &(0..k).collect::<Vec<_>>(), true).unwrap()
    }

    #[test]
    fn single_word_takes_2n_plus_1() {
        for n in 1..=6 {
            assert_eq!(consecutive(n, 1).n_steps(), 2 * n + 1);
        }
    }

    #[test]
    fn adjacent_words_take_2n_plus_3() {
        for n in 1..=6 {
            let s = consecutive(n, 2);
            assert_eq!(s.n_steps(), 2 * n + 3);
            assert_eq!(s.merged_pairs(), usize::from(n >= 2));
        }
    }

    #[test]
    fn two_word_merge_sits_at_layer_n_minus_2() {
        let s = consecutive(4, 2);
        let bi: Vec<_> = s
            .ops()
            .filter_map(|op| match op {
                PipelineOp::Bidirectional { up, down, layer } => Some((*up, *down, *layer)),
                _ => None,
            })
            .collect();
        assert_eq!(bi, vec![(0, 1, 2)]);
    }

    #[test]
    fn merged_pairs_and_conflicts() {
        for n in 1..=6 {
            for k in 1..=6 {
                let s = consecutive(n, k);
                assert_eq!(
                    s.merged_pairs(),
                    merged_pairs_closed_form(n, k),
                    "n={n} k={k}"
                );
                assert_eq!(s.n_steps(), pipeline_steps_closed_form(n, k, true));
                let layout = TreeLayout::new(n, k);
                assert!(find_conflicts(&s, &layout).is_empty(), "n={n} k={k}");
                let seq = schedule_words(n, &(0..k).collect::<Vec<_>>(), false).unwrap();
                assert_eq!(seq.n_steps(), pipeline_steps_closed_form(n, k, false));
                assert_eq!(seq.merged_pairs(), 0);
            }
        }
    }

    #[test]
    fn far_words_do_not_overlap() {
        for n in 2..=5 {
            let s = schedule_words(n, &[0, n + 1], true).unwrap();
            assert_eq!(s.merged_pairs(), 0);
            assert_eq!(s.handoffs(), 0);
            assert_eq!(s.n_steps(), 2 * (2 * n + 1));
            let gap = schedule_words(n, &[0, n - 1], true).unwrap();
            assert_eq!(gap.merged_pairs(), 1);
            assert_eq!(gap.n_steps(), 2 * n + 1 + 2 * (n - 1));
        }
    }

    #[test]
    fn rejects_bad_word_lists() {
        assert!(schedule_words(2, &[1, 1], true).is_err());
        assert!(schedule_words(0, &[0], true).is_err());
    }

    #[test]
    fn merge_counts_match_their_sum_form() {
        for n in 1..=6 {
            for k in 1..=6 {
                let f: usize = (1..k).map(|i| i.min(n - 1)).sum();
                assert_eq!(merged_pairs_closed_form(n, k), f);
            }
        }
    }
}
