//! Shift-register priority queue sorted by odd-even transposition.
//!
//! Cell 0 is the output end. Live entries always occupy a prefix of the
//! cells: new entries enter behind the last live cell, dequeues shift every
//! cell one position toward the output. A sort cycle compare-swaps either the
//! odd pairs `(1,2), (3,4), ...` or the even pairs `(0,1), (2,3), ...`; a pair
//! swaps only when the cell nearer the output holds a strictly smaller
//! average, so equal averages keep their entry order.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QueueCell {
    pub valid: bool,
    pub qid: u32,
    pub avg: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    fn first_index(self) -> usize {
        match self {
            Parity::Odd => 1,
            Parity::Even => 0,
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Odd => Parity::Even,
            Parity::Even => Parity::Odd,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PriorityQueue {
    cells: Vec<QueueCell>,
    len: usize,
}

impl PriorityQueue {
    pub fn new(depth: usize) -> Self {
        PriorityQueue {
            cells: vec![QueueCell::default(); depth],
            len: 0,
        }
    }

    pub fn depth(&self) -> usize {
        self.cells.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_full(&self) -> bool {
        self.len == self.cells.len()
    }

    pub fn cells(&self) -> &[QueueCell] {
        &self.cells
    }

    /// Returns false when every cell is occupied.
    pub fn insert(&mut self, qid: u32, avg: u64) -> bool {
        if self.is_full() {
            return false;
        }
        self.cells[self.len] = QueueCell {
            valid: true,
            qid,
            avg,
        };
        self.len += 1;
        true
    }

    /// One compare-swap cycle over the pairs of the given parity. Writes one
    /// flag per compared pair into `flags` (cleared first) and returns whether
    /// any pair swapped.
    pub fn sort_step(&mut self, parity: Parity, flags: &mut Vec<bool>) -> bool {
        flags.clear();
        let mut any = false;
        let mut i = parity.first_index();
        while i + 1 < self.len {
            let swap = self.cells[i].avg < self.cells[i + 1].avg;
            if swap {
                self.cells.swap(i, i + 1);
                any = true;
            }
            flags.push(swap);
            i += 2;
        }
        any
    }

    /// Right-shift mode: removes the output cell.
    pub fn dequeue(&mut self) -> Option<QueueCell> {
        if self.len == 0 {
            return None;
        }
        let head = self.cells[0];
        self.cells.copy_within(1..self.len, 0);
        self.len -= 1;
        self.cells[self.len] = QueueCell::default();
        Some(head)
    }

    pub fn clear(&mut self) {
        self.cells.fill(QueueCell::default());
        self.len = 0;
    }
}
