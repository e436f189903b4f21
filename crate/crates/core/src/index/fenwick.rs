/// Binary indexed tree over 0/1 liveness flags. Maps between slot ids and
/// positions in the live sequence.
#[derive(Clone, Debug, Default)]
pub(crate) struct Fenwick {
    // 1-based; tree[0] unused.
    tree: Vec<usize>,
}

#[inline]
fn lowbit(i: usize) -> usize {
    i & i.wrapping_neg()
}

impl Fenwick {
    pub(crate) fn new() -> Self {
        Self { tree: vec![0] }
    }

    pub(crate) fn len(&self) -> usize {
        self.tree.len() - 1
    }

    /// Appends a slot with the given weight.
    pub(crate) fn push(&mut self, value: usize) {
        let i = self.tree.len();
        let covered = self.prefix(i - 1) - self.prefix(i - lowbit(i));
        self.tree.push(value + covered);
    }

    /// Sum of the first `count` slots.
    pub(crate) fn prefix(&self, count: usize) -> usize {
        let mut i = count;
        let mut sum = 0;
        while i > 0 {
            sum += self.tree[i];
            i -= lowbit(i);
        }
        sum
    }

    pub(crate) fn decrement(&mut self, slot: usize) {
        let mut i = slot + 1;
        while i < self.tree.len() {
            self.tree[i] -= 1;
            i += lowbit(i);
        }
    }

    /// Slot holding the `k`-th (0-based) unit of weight. Caller guarantees
    /// `k < prefix(len)`.
    pub(crate) fn select(&self, k: usize) -> usize {
        let n = self.len();
        let mut pos = 0;
        let mut rem = k;
        let mut step = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= rem {
                pos = next;
                rem -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_prefix_select() {
        let flags = [1, 0, 1, 1, 0, 0, 1, 1, 1, 0, 1];
        let mut f = Fenwick::new();
        for &v in &flags {
            f.push(v);
        }
        for i in 0..=flags.len() {
            assert_eq!(f.prefix(i), flags[..i].iter().sum::<usize>());
        }
        let live: Vec<usize> = (0..flags.len()).filter(|&i| flags[i] == 1).collect();
        for (k, &slot) in live.iter().enumerate() {
            assert_eq!(f.select(k), slot);
        }
    }

    #[test]
    fn decrement_updates_ranks() {
        let mut f = Fenwick::new();
        for _ in 0..9 {
            f.push(1);
        }
        f.decrement(3);
        f.decrement(0);
        assert_eq!(f.prefix(9), 7);
        assert_eq!(f.select(0), 1);
        assert_eq!(f.select(2), 4);
    }
}
