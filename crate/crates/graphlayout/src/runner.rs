use std::ops::Range;
use std::thread;

use graphlayout_core::partition::SweepRunner;

/// Runs each sweep as `threads` contiguous chunks on scoped threads.
/// Label reads race between chunks, so results depend on scheduling.
#[derive(Debug, Clone, Copy)]
pub struct Threads {
    threads: usize,
}

impl Threads {
    pub fn new(threads: usize) -> Self {
        Threads {
            threads: threads.max(1),
        }
    }
}

impl SweepRunner for Threads {
    fn run(&self, n: usize, body: &(dyn Fn(usize, Range<usize>) -> usize + Sync)) -> usize {
        let chunk = n.div_ceil(self.threads).max(1);
        thread::scope(|s| {
            let handles: Vec<_> = (0..n)
                .step_by(chunk)
                .enumerate()
                .map(|(i, start)| s.spawn(move || body(i, start..(start + chunk).min(n))))
                .collect();
            handles.into_iter().map(|h| h.join().expect("sweep thread panicked")).sum()
        })
    }
}
