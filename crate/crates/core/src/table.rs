/// Triangular set of 2D moments `{L_pq : p + q ≤ M}` with the grid it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    order: usize,
    nx: usize,
    ny: usize,
    /// p-major: all q for p = 0, then p = 1, ...
    values: Vec<f64>,
}

/// Number of moments with `p + q ≤ order`.
pub fn moment_count(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

impl MomentTable {
    pub fn zeros(order: usize, nx: usize, ny: usize) -> Self {
        MomentTable {
            order,
            nx,
            ny,
            values: vec![0.0; moment_count(order)],
        }
    }

    pub fn from_fn(order: usize, nx: usize, ny: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(order, nx, ny);
        for p in 0..=order {
            for q in 0..=order - p {
                let idx = t.index(p, q);
                t.values[idx] = f(p, q);
            }
        }
        t
    }

    #[inline]
    pub fn index(&self, p: usize, q: usize) -> usize {
        debug_assert!(p + q <= self.order);
        p * (self.order + 1) - p * p.saturating_sub(1) / 2 + q
    }

    #[inline]
    pub fn get(&self, p: usize, q: usize) -> f64 {
        self.values[self.index(p, q)]
    }

    #[inline]
    pub fn set(&mut self, p: usize, q: usize, v: f64) {
        let idx = self.index(p, q);
        self.values[idx] = v;
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(p, q, L_pq)` in p-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let m = self.order;
        (0..=m).flat_map(move |p| (0..=m - p).map(move |q| (p, q, self.get(p, q))))
    }

    /// Bitwise equality of every entry and of the metadata.
    pub fn bit_identical(&self, other: &MomentTable) -> bool {
        self.order == other.order
            && self.nx == other.nx
            && self.ny == other.ny
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}
