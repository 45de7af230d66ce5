//! Solver for `(K + σM) x = b` on a graph mesh.
//!
//! Edge interiors are tridiagonal and eliminated with the Thomas algorithm;
//! what remains is a small dense system in the vertex unknowns, solved by
//! Cholesky.

use alloc::vec;
use alloc::vec::Vec;

use crate::function_space::Mesh;
use crate::math::sqrt;

/// LU factors of the constant-coefficient tridiagonal matrix with diagonal
/// `d` and off-diagonals `o`.
#[derive(Debug, Clone)]
struct Tridiag {
    off: f64,
    /// Modified superdiagonal `c'_i`.
    cp: Vec<f64>,
    /// Pivots.
    piv: Vec<f64>,
}

impl Tridiag {
    fn new(n: usize, d: f64, o: f64) -> Self {
        let mut cp = vec![0.0; n];
        let mut piv = vec![0.0; n];
        let mut prev = 0.0;
        for i in 0..n {
            let p = d - o * prev;
            piv[i] = p;
            cp[i] = o / p;
            prev = cp[i];
        }
        Tridiag { off: o, cp, piv }
    }

    fn solve(&self, x: &mut [f64]) {
        let n = x.len();
        if n == 0 {
            return;
        }
        x[0] /= self.piv[0];
        for i in 1..n {
            x[i] = (x[i] - self.off * x[i - 1]) / self.piv[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.cp[i] * x[i + 1];
        }
    }
}

#[derive(Debug, Clone)]
struct EdgeBlock {
    tri: Tridiag,
    /// Response of the interior to a unit value at the first / last vertex.
    za: Vec<f64>,
    zb: Vec<f64>,
}

/// Factorization of `K + σM` restricted to the free nodes.
#[derive(Debug, Clone)]
pub(crate) struct ShiftedStiffness {
    sigma: f64,
    blocks: Vec<EdgeBlock>,
    /// Free vertices and their row in the Schur complement.
    vrow: Vec<Option<usize>>,
    chol: Vec<f64>,
    nfree: usize,
}

impl ShiftedStiffness {
    pub(crate) fn new(mesh: &Mesh, sigma: f64) -> Self {
        let nv = mesh.num_vertices();
        let mut vrow = vec![None; nv];
        let mut nfree = 0;
        for (v, r) in vrow.iter_mut().enumerate() {
            if mesh.is_free(v) {
                *r = Some(nfree);
                nfree += 1;
            }
        }
        let m = mesh.lumped_mass();
        let mut s = vec![0.0; nfree * nfree];
        for v in 0..nv {
            if let Some(r) = vrow[v] {
                s[r * nfree + r] += sigma * m[v];
            }
        }
        let mut blocks = Vec::with_capacity(mesh.edges().len());
        for em in mesh.edges() {
            let n = em.interior();
            let inv = 1.0 / em.h;
            let tri = Tridiag::new(n, 2.0 * inv + sigma * em.h, -inv);
            let mut za = vec![0.0; n];
            let mut zb = vec![0.0; n];
            if n > 0 {
                za[0] = inv;
                zb[n - 1] = inv;
                tri.solve(&mut za);
                tri.solve(&mut zb);
            }
            // Vertex rows: (x_v - x_neighbour)/h at each end.
            let (ra, rb) = (vrow[em.a], vrow[em.b]);
            let (aa, ab, ba, bb) = if n == 0 {
                (inv, -inv, -inv, inv)
            } else {
                (
                    inv - za[0] * inv,
                    -zb[0] * inv,
                    -za[n - 1] * inv,
                    inv - zb[n - 1] * inv,
                )
            };
            if let Some(ra) = ra {
                s[ra * nfree + ra] += aa;
                if let Some(rb) = rb {
                    s[ra * nfree + rb] += ab;
                }
            }
            if let Some(rb) = rb {
                s[rb * nfree + rb] += bb;
                if let Some(ra) = ra {
                    s[rb * nfree + ra] += ba;
                }
            }
            blocks.push(EdgeBlock { tri, za, zb });
        }
        cholesky_in_place(&mut s, nfree);
        ShiftedStiffness {
            sigma,
            blocks,
            vrow,
            chol: s,
            nfree,
        }
    }

    pub(crate) fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Solves in place; entries at boundary nodes are ignored and returned
    /// as zero.
    pub(crate) fn solve(&self, mesh: &Mesh, rhs: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; rhs.len()];
        let mut vr = vec![0.0; self.nfree];
        for (v, r) in self.vrow.iter().enumerate() {
            if let Some(r) = r {
                vr[*r] = rhs[v];
            }
        }
        let mut interiors: Vec<Vec<f64>> = Vec::with_capacity(self.blocks.len());
        for (em, blk) in mesh.edges().iter().zip(&self.blocks) {
            let n = em.interior();
            let mut z0 = rhs[em.offset..em.offset + n].to_vec();
            blk.tri.solve(&mut z0);
            if n > 0 {
                let inv = 1.0 / em.h;
                if let Some(ra) = self.vrow[em.a] {
                    vr[ra] += z0[0] * inv;
                }
                if let Some(rb) = self.vrow[em.b] {
                    vr[rb] += z0[n - 1] * inv;
                }
            }
            interiors.push(z0);
        }
        cholesky_solve(&self.chol, self.nfree, &mut vr);
        for (v, r) in self.vrow.iter().enumerate() {
            if let Some(r) = r {
                x[v] = vr[*r];
            }
        }
        for ((em, blk), z0) in mesh.edges().iter().zip(&self.blocks).zip(interiors) {
            let (xa, xb) = (x[em.a], x[em.b]);
            for (k, z) in z0.into_iter().enumerate() {
                x[em.offset + k] = z + xa * blk.za[k] + xb * blk.zb[k];
            }
        }
        x
    }
}

/// Lower Cholesky factor of a dense SPD matrix, stored in the lower triangle.
pub(crate) fn cholesky_in_place(a: &mut [f64], n: usize) {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        let d = sqrt(d.max(f64::MIN_POSITIVE));
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
}

pub(crate) fn cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::GraphFunction;
    use crate::shapes;

    #[test]
    fn solves_shifted_system_on_graphs() {
        let graphs = [
            shapes::tadpole(2.0).unwrap(),
            shapes::bridge(&[0.05, 1.0, 2.0]).unwrap(),
            shapes::signpost(1.0, 3.0).unwrap(),
            shapes::fork(&[0.3, 1.0, 2.0]).unwrap(),
        ];
        for g in graphs {
            let mesh = crate::function_space::Mesh::new(&g.truncate(3.0).unwrap(), 0.1).unwrap();
            let sigma = 0.7;
            let fac = ShiftedStiffness::new(&mesh, sigma);
            let b: Vec<f64> = (0..mesh.len())
                .map(|j| if mesh.is_free(j) { libm::sin(j as f64) } else { 0.0 })
                .collect();
            let x = fac.solve(&mesh, &b);
            let u = GraphFunction::from_values(mesh.clone(), x.clone()).unwrap();
            let kx = u.stiffness_apply();
            for j in 0..mesh.len() {
                if mesh.is_free(j) {
                    let r = kx[j] + sigma * mesh.lumped_mass()[j] * x[j] - b[j];
                    assert!(r.abs() < 1e-10, "{r}");
                }
            }
        }
    }
}
