//! PE handlers and the earliest-finish-time selector.

/// One execution-time entry read from the exec store. `supported` is kept
/// apart from the value so a saturated legal time stays distinguishable from
/// the "unsupported" sentinel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExecEntry {
    pub value: u64,
    pub supported: bool,
}

/// The availability registers of all PE handlers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeHandlers {
    avail: Vec<u64>,
    max: u64,
}

impl PeHandlers {
    pub fn new(pes: usize, max: u64) -> Self {
        PeHandlers {
            avail: vec![0; pes],
            max,
        }
    }

    pub fn avail(&self) -> &[u64] {
        &self.avail
    }

    pub fn sync(&mut self, times: &[u64]) {
        for (reg, &t) in self.avail.iter_mut().zip(times) {
            *reg = t.min(self.max);
        }
    }

    /// Finish time per handler for one exec row (saturating).
    pub fn finish_times(&self, row: &[ExecEntry]) -> Vec<u64> {
        self.avail
            .iter()
            .zip(row)
            .map(|(&a, e)| a.saturating_add(e.value).min(self.max))
            .collect()
    }

    pub fn commit(&mut self, pe: usize, finish: u64) {
        self.avail[pe] = finish;
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    index: usize,
    finish: u64,
    eligible: bool,
}

fn pick(left: Candidate, right: Candidate) -> Candidate {
    match (left.eligible, right.eligible) {
        (_, false) => left,
        (false, true) => right,
        (true, true) if right.finish < left.finish => right,
        _ => left,
    }
}

/// Minimum comparator tree over the handlers' finish times. Each node keeps
/// its left input unless the right one is strictly smaller, so ties resolve to
/// the lowest PE index; ineligible inputs never win against eligible ones.
/// Returns `None` when no input is eligible.
pub fn eft_select(finish: &[u64], row: &[ExecEntry]) -> Option<usize> {
    let mut level: Vec<Candidate> = finish
        .iter()
        .zip(row)
        .enumerate()
        .map(|(index, (&finish, e))| Candidate {
            index,
            finish,
            eligible: e.supported,
        })
        .collect();
    if level.is_empty() {
        return None;
    }
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| match pair {
                [l, r] => pick(*l, *r),
                [l] => *l,
                _ => unreachable!(),
            })
            .collect();
    }
    let root = level[0];
    root.eligible.then_some(root.index)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(values: &[u64]) -> Vec<ExecEntry> {
        values
            .iter()
            .map(|&value| ExecEntry {
                value,
                supported: true,
            })
            .collect()
    }

    #[test]
    fn finish_is_avail_plus_exec() {
        let mut h = PeHandlers::new(2, u64::MAX);
        h.sync(&[3, 0]);
        let r = row(&[5, 9]);
        let finish = h.finish_times(&r);
        assert_eq!(finish, vec![8, 9]);
        let pe = eft_select(&finish, &r).unwrap();
        assert_eq!(pe, 0);
        h.commit(pe, finish[pe]);
        assert_eq!(h.avail(), &[8, 0]);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        assert_eq!(eft_select(&[7, 7, 12, 7], &row(&[0; 4])), Some(0));
        assert_eq!(eft_select(&[9, 7, 12, 7, 7], &row(&[0; 5])), Some(1));
    }

    #[test]
    fn unsupported_inputs_never_win() {
        let mut r = row(&[1, 1, 1]);
        r[0].supported = false;
        r[1].supported = false;
        assert_eq!(eft_select(&[0, 0, 50], &r), Some(2));
        r[2].supported = false;
        assert_eq!(eft_select(&[0, 0, 50], &r), None);
    }

    #[test]
    fn registers_saturate() {
        let mut h = PeHandlers::new(1, 100);
        h.sync(&[1_000]);
        assert_eq!(h.avail(), &[100]);
        assert_eq!(h.finish_times(&row(&[5])), vec![100]);
    }

    #[test]
    fn tree_matches_linear_scan() {
        let finish: Vec<u64> = (0..13).map(|i| (i * 7919 % 11) as u64).collect();
        let r = row(&[0; 13]);
        let min = *finish.iter().min().unwrap();
        let first = finish.iter().position(|&f| f == min).unwrap();
        assert_eq!(eft_select(&finish, &r), Some(first));
    }
}
