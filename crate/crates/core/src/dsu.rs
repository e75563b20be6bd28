//! Disjoint-set forest shared by the enumeration oracle and the sampler.

#[derive(Clone, Debug)]
pub(crate) struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
    sets: u32,
}

impl DisjointSet {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            sets: n as u32,
        }
    }

    /// Restores `n` singleton sets, reusing the allocation.
    pub(crate) fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
        self.size.fill(1);
        self.sets = self.parent.len() as u32;
    }

    pub(crate) fn find(&mut self, mut x: u32) -> u32 {
        // path halving
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Merges the sets of `a` and `b`; returns false when already joined.
    pub(crate) fn union(&mut self, a: u32, b: u32) -> bool {
        let mut ra = self.find(a);
        let mut rb = self.find(b);
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        self.sets -= 1;
        true
    }

    pub(crate) fn sets(&self) -> u32 {
        self.sets
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_sets_through_unions() {
        let mut dsu = DisjointSet::new(5);
        assert_eq!(dsu.sets(), 5);
        assert!(dsu.union(0, 1));
        assert!(dsu.union(3, 4));
        assert!(!dsu.union(1, 0));
        assert!(dsu.union(1, 4));
        assert_eq!(dsu.sets(), 2);
        assert_eq!(dsu.find(0), dsu.find(3));
        assert_ne!(dsu.find(2), dsu.find(0));
        dsu.reset();
        assert_eq!(dsu.sets(), 5);
        assert_ne!(dsu.find(0), dsu.find(1));
    }
}
