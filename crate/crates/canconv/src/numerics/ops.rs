use alloc::vec;
use alloc::vec::Vec;

use super::scalar::Scalar;
use super::tensor::Tensor;
use crate::error::{invalid_arg, shape_mismatch, Result};

#[cfg(feature = "rayon")]
use rayon::prelude::*;

/// Sliding-window geometry of an unfold, kept so the adjoint can scatter
/// gradients back to the right source pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnfoldGeometry {
    pub h: usize,
    pub w: usize,
    pub c: usize,
    pub window: usize,
    pub stride: usize,
    pub pad: usize,
    pub out_h: usize,
    pub out_w: usize,
}

fn check_window(k: usize) -> Result<()> {
    if k == 0 || k % 2 == 0 {
        return Err(invalid_arg!("window must be odd and positive, got {k}"));
    }
    Ok(())
}

/// Extracts the `k x k` neighborhood of every pixel.
///
/// Output row `(x, y)` holds the window around `(x, y)` flattened in
/// `(dy, dx, channel)` order: tap `(dy, dx)` of channel `c` lands at offset
/// `(dy * k + dx) * C + c`. Taps outside the image contribute exact zeros.
pub fn unfold<T: Scalar>(x: &Tensor<T>, window: usize) -> Result<Tensor<T>> {
    check_window(window)?;
    if x.dims().len() != 3 {
        return Err(shape_mismatch!("unfold expects [H, W, C], got {:?}", x.dims()));
    }
    let (h, w, c) = (x.dim(0), x.dim(1), x.dim(2));
    let geom = UnfoldGeometry {
        h,
        w,
        c,
        window,
        stride: 1,
        pad: window / 2,
        out_h: h,
        out_w: w,
    };
    unfold_with_geometry(x, &geom)
}

/// Strided unfold with explicit zero padding, the im2col step of a standard
/// convolution. `out = floor((extent + 2*pad - window) / stride) + 1`.
pub fn unfold_strided<T: Scalar>(
    x: &Tensor<T>,
    window: usize,
    stride: usize,
    pad: usize,
) -> Result<(Tensor<T>, UnfoldGeometry)> {
    if window == 0 || stride == 0 {
        return Err(invalid_arg!("window and stride must be positive"));
    }
    if x.dims().len() != 3 {
        return Err(shape_mismatch!("unfold expects [H, W, C], got {:?}", x.dims()));
    }
    let (h, w, c) = (x.dim(0), x.dim(1), x.dim(2));
    if h + 2 * pad < window || w + 2 * pad < window {
        return Err(invalid_arg!(
            "window {window} larger than padded image {h}x{w} (pad {pad})"
        ));
    }
    let geom = UnfoldGeometry {
        h,
        w,
        c,
        window,
        stride,
        pad,
        out_h: (h + 2 * pad - window) / stride + 1,
        out_w: (w + 2 * pad - window) / stride + 1,
    };
    Ok((unfold_with_geometry(x, &geom)?, geom))
}

fn unfold_with_geometry<T: Scalar>(x: &Tensor<T>, geom: &UnfoldGeometry) -> Result<Tensor<T>> {
    let &UnfoldGeometry { h, w, c, window, stride, pad, out_h, out_w } = geom;
    let row_len = window * window * c;
    let mut out = Tensor::zeros(&[out_h, out_w, row_len]);
    let src = x.as_slice();

    let fill_row = |ox: usize, oy: usize, row: &mut [T]| {
        for dy in 0..window {
            let ix = (ox * stride + dy) as isize - pad as isize;
            if ix < 0 || ix >= h as isize {
                continue;
            }
            for dx in 0..window {
                let iy = (oy * stride + dx) as isize - pad as isize;
                if iy < 0 || iy >= w as isize {
                    continue;
                }
                let src_off = (ix as usize * w + iy as usize) * c;
                let dst_off = (dy * window + dx) * c;
                row[dst_off..dst_off + c].copy_from_slice(&src[src_off..src_off + c]);
            }
        }
    };

    let rows = out.as_mut_slice();
    #[cfg(feature = "rayon")]
    {
        rows.par_chunks_mut(row_len).enumerate().for_each(|(i, row)| {
            fill_row(i / out_w, i % out_w, row);
        });
    }
    #[cfg(not(feature = "rayon"))]
    {
        for (i, row) in rows.chunks_mut(row_len).enumerate() {
            fill_row(i / out_w, i % out_w, row);
        }
    }
    Ok(out)
}

/// Adjoint of the unfold: scatters per-tap gradients back onto the source
/// image. Formulated as a gather over input pixels, accumulating taps in
/// ascending `(dy, dx)` order, so it is deterministic and parallel-safe.
pub fn fold_accumulate<T: Scalar>(dp: &Tensor<T>, geom: &UnfoldGeometry) -> Result<Tensor<T>> {
    let &UnfoldGeometry { h, w, c, window, stride, pad, out_h, out_w } = geom;
    let row_len = window * window * c;
    if dp.dims() != [out_h, out_w, row_len] {
        return Err(shape_mismatch!(
            "fold expects [{out_h}, {out_w}, {row_len}], got {:?}",
            dp.dims()
        ));
    }
    let mut dx = Tensor::zeros(&[h, w, c]);
    let src = dp.as_slice();

    let fill_pixel = |ix: usize, iy: usize, px: &mut [T]| {
        for dy in 0..window {
            // ox * stride + dy - pad == ix
            let num_x = ix + pad;
            if num_x < dy {
                continue;
            }
            let sx = num_x - dy;
            if sx % stride != 0 {
                continue;
            }
            let ox = sx / stride;
            if ox >= out_h {
                continue;
            }
            for dxt in 0..window {
                let num_y = iy + pad;
                if num_y < dxt {
                    continue;
                }
                let sy = num_y - dxt;
                if sy % stride != 0 {
                    continue;
                }
                let oy = sy / stride;
                if oy >= out_w {
                    continue;
                }
                let src_off = (ox * out_w + oy) * row_len + (dy * window + dxt) * c;
                for ch in 0..c {
                    px[ch] += src[src_off + ch];
                }
            }
        }
    };

    let pixels = dx.as_mut_slice();
    #[cfg(feature = "rayon")]
    {
        pixels.par_chunks_mut(c).enumerate().for_each(|(i, px)| {
            fill_pixel(i / w, i % w, px);
        });
    }
    #[cfg(not(feature = "rayon"))]
    {
        for (i, px) in pixels.chunks_mut(c).enumerate() {
            fill_pixel(i / w, i % w, px);
        }
    }
    Ok(dx)
}

/// Windowed spatial mean with zero padding: every output is the window sum
/// divided by `window^2`, borders included.
pub fn mean_pool_window<T: Scalar>(x: &Tensor<T>, window: usize) -> Result<Tensor<T>> {
    check_window(window)?;
    if x.dims().len() != 3 {
        return Err(shape_mismatch!("mean_pool expects [H, W, C], got {:?}", x.dims()));
    }
    let (h, w, c) = (x.dim(0), x.dim(1), x.dim(2));
    let half = (window / 2) as isize;
    let inv = T::from_f64(1.0 / (window * window) as f64);
    let mut out = Tensor::zeros(&[h, w, c]);
    let src = x.as_slice();

    let fill_pixel = |px: usize, py: usize, dst: &mut [T]| {
        let mut acc = vec![T::ZERO; c];
        for dy in -half..=half {
            let ix = px as isize + dy;
            if ix < 0 || ix >= h as isize {
                continue;
            }
            for dx in -half..=half {
                let iy = py as isize + dx;
                if iy < 0 || iy >= w as isize {
                    continue;
                }
                let off = (ix as usize * w + iy as usize) * c;
                for ch in 0..c {
                    acc[ch] += src[off + ch];
                }
            }
        }
        for ch in 0..c {
            dst[ch] = acc[ch] * inv;
        }
    };

    let pixels = out.as_mut_slice();
    #[cfg(feature = "rayon")]
    {
        pixels.par_chunks_mut(c).enumerate().for_each(|(i, dst)| {
            fill_pixel(i / w, i % w, dst);
        });
    }
    #[cfg(not(feature = "rayon"))]
    {
        for (i, dst) in pixels.chunks_mut(c).enumerate() {
            fill_pixel(i / w, i % w, dst);
        }
    }
    Ok(out)
}

/// `[M, K] x [K, N]` matrix product.
///
/// Each output element accumulates over the inner dimension in ascending
/// order, so results are identical whether or not rows are computed in
/// parallel.
pub fn matmul<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>> {
    if a.dims().len() != 2 || b.dims().len() != 2 {
        return Err(shape_mismatch!("matmul expects rank-2, got {:?} x {:?}", a.dims(), b.dims()));
    }
    let (m, k) = (a.dim(0), a.dim(1));
    let (k2, n) = (b.dim(0), b.dim(1));
    if k != k2 {
        return Err(shape_mismatch!("matmul inner extents {k} vs {k2}"));
    }
    let mut out = Tensor::zeros(&[m, n]);
    mm(a.as_slice(), b.as_slice(), out.as_mut_slice(), k, n);
    Ok(out)
}

pub(crate) fn mm<T: Scalar>(a: &[T], b: &[T], out: &mut [T], k: usize, n: usize) {
    let row = |arow: &[T], orow: &mut [T]| {
        for (kk, &aik) in arow.iter().enumerate() {
            let brow = &b[kk * n..kk * n + n];
            for (o, &bv) in orow.iter_mut().zip(brow) {
                *o += aik * bv;
            }
        }
    };
    #[cfg(feature = "rayon")]
    {
        if out.len() * k >= 1 << 16 {
            out.par_chunks_mut(n)
                .zip(a.par_chunks(k))
                .for_each(|(orow, arow)| row(arow, orow));
            return;
        }
    }
    for (orow, arow) in out.chunks_mut(n).zip(a.chunks(k)) {
        row(arow, orow);
    }
}

/// Rows processed per partial sum in the cross-row accumulating products.
/// Fixed so the summation tree is independent of thread count.
const ACC_CHUNK: usize = 512;

/// `a^T x b` for `a: [R, M]`, `b: [R, N]` -> `[M, N]`.
///
/// Accumulation runs over `r` in 512-row chunks; chunk partials are added in
/// ascending chunk order. The serial and parallel paths share that tree and
/// produce identical bits.
pub fn matmul_atb<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>> {
    if a.dims().len() != 2 || b.dims().len() != 2 || a.dim(0) != b.dim(0) {
        return Err(shape_mismatch!("atb expects [R,M] x [R,N], got {:?} x {:?}", a.dims(), b.dims()));
    }
    let (r, m) = (a.dim(0), a.dim(1));
    let n = b.dim(1);
    let mut out = Tensor::zeros(&[m, n]);
    atb(a.as_slice(), b.as_slice(), out.as_mut_slice(), r, m, n);
    Ok(out)
}

pub(crate) fn atb<T: Scalar>(a: &[T], b: &[T], out: &mut [T], r: usize, m: usize, n: usize) {
    let chunk_partial = |rows: core::ops::Range<usize>, acc: &mut [T]| {
        for rr in rows {
            let arow = &a[rr * m..rr * m + m];
            let brow = &b[rr * n..rr * n + n];
            for (i, &av) in arow.iter().enumerate() {
                let orow = &mut acc[i * n..i * n + n];
                for (o, &bv) in orow.iter_mut().zip(brow) {
                    *o += av * bv;
                }
            }
        }
    };
    let nchunks = r.div_ceil(ACC_CHUNK);
    if nchunks <= 1 {
        chunk_partial(0..r, out);
        return;
    }
    let bounds = |ci: usize| ci * ACC_CHUNK..(ci * ACC_CHUNK + ACC_CHUNK).min(r);
    #[cfg(feature = "rayon")]
    let partials: Vec<Vec<T>> = (0..nchunks)
        .into_par_iter()
        .map(|ci| {
            let mut acc = vec![T::ZERO; m * n];
            chunk_partial(bounds(ci), &mut acc);
            acc
        })
        .collect();
    #[cfg(not(feature = "rayon"))]
    let partials: Vec<Vec<T>> = (0..nchunks)
        .map(|ci| {
            let mut acc = vec![T::ZERO; m * n];
            chunk_partial(bounds(ci), &mut acc);
            acc
        })
        .collect();
    for p in &partials {
        for (o, &v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
}

/// `a x b^T` for `a: [M, K]`, `b: [N, K]` -> `[M, N]`. Each element is a dot
/// product accumulated over `k` ascending.
pub fn matmul_abt<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>> {
    if a.dims().len() != 2 || b.dims().len() != 2 || a.dim(1) != b.dim(1) {
        return Err(shape_mismatch!("abt expects [M,K] x [N,K], got {:?} x {:?}", a.dims(), b.dims()));
    }
    let (m, k) = (a.dim(0), a.dim(1));
    let n = b.dim(0);
    let mut out = Tensor::zeros(&[m, n]);
    abt(a.as_slice(), b.as_slice(), out.as_mut_slice(), k, n);
    Ok(out)
}

pub(crate) fn abt<T: Scalar>(a: &[T], b: &[T], out: &mut [T], k: usize, n: usize) {
    let row = |arow: &[T], orow: &mut [T]| {
        for (j, o) in orow.iter_mut().enumerate() {
            let brow = &b[j * k..j * k + k];
            let mut acc = T::ZERO;
            for (&av, &bv) in arow.iter().zip(brow) {
                acc += av * bv;
            }
            *o = acc;
        }
    };
    #[cfg(feature = "rayon")]
    {
        if out.len() * k >= 1 << 16 {
            out.par_chunks_mut(n)
                .zip(a.par_chunks(k))
                .for_each(|(orow, arow)| row(arow, orow));
            return;
        }
    }
    for (orow, arow) in out.chunks_mut(n).zip(a.chunks(k)) {
        row(arow, orow);
    }
}

/// Triple outer product: `out[i, j, l] = w1[i] * w2[j] * w3[l]`.
pub fn kron3<T: Scalar>(w1: &[T], w2: &[T], w3: &[T]) -> Result<Tensor<T>> {
    if w1.is_empty() || w2.is_empty() || w3.is_empty() {
        return Err(invalid_arg!("kron3 factors must be nonempty"));
    }
    let mut out = Tensor::zeros(&[w1.len(), w2.len(), w3.len()]);
    let dst = out.as_mut_slice();
    let mut idx = 0;
    for &a in w1 {
        for &b in w2 {
            let ab = a * b;
            for &c in w3 {
                dst[idx] = ab * c;
                idx += 1;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn unfold_identity_window() {
        // k = 1: every row is the pixel itself.
        let x = Tensor::new(&[2, 2, 3], vec![1.5f32; 12]).unwrap();
        let u = unfold(&x, 1).unwrap();
        assert_eq!(u.dims(), &[2, 2, 3]);
        assert!(u.as_slice().iter().all(|&v| v == 1.5));
    }

    #[test]
    fn unfold_center_pixel_full_coverage() {
        let x = Tensor::new(&[3, 3, 1], (1..=9).map(|v| v as f32).collect()).unwrap();
        let u = unfold(&x, 3).unwrap();
        // Center pixel (1,1): the whole image row-major.
        let row = &u.as_slice()[(1 * 3 + 1) * 9..(1 * 3 + 1) * 9 + 9];
        assert_eq!(row, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
    }

    #[test]
    fn unfold_corner_zero_padded() {
        let x = Tensor::new(&[3, 3, 1], vec![2.0f32; 9]).unwrap();
        let u = unfold(&x, 3).unwrap();
        let row = &u.as_slice()[0..9];
        let nonzero = row.iter().filter(|&&v| v == 2.0).count();
        let zero = row.iter().filter(|&&v| v == 0.0).count();
        assert_eq!((nonzero, zero), (4, 5));
    }

    #[test]
    fn unfold_rejects_even_window() {
        let x = Tensor::<f32>::zeros(&[3, 3, 1]);
        assert!(unfold(&x, 2).is_err());
        assert!(unfold(&x, 0).is_err());
    }

    #[test]
    fn mean_pool_constant_interior_and_corner() {
        let x = Tensor::new(&[4, 4, 1], vec![3.0f32; 16]).unwrap();
        let p = mean_pool_window(&x, 3).unwrap();
        assert!((p.at3(1, 1, 0) - 3.0).abs() < 1e-6);
        // Corner window covers 4 of 9 taps.
        assert!((p.at3(0, 0, 0) - 3.0 * 4.0 / 9.0).abs() < 1e-6);
    }

    #[test]
    fn mean_pool_matches_unfold_reduction() {
        let mut rng = crate::numerics::SeededRng::new(5);
        let x = Tensor::new(
            &[5, 5, 2],
            (0..50).map(|_| rng.next_f32()).collect(),
        )
        .unwrap();
        let k = 3;
        let p = mean_pool_window(&x, k).unwrap();
        let u = unfold(&x, k).unwrap();
        for px in 0..5 {
            for py in 0..5 {
                for c in 0..2 {
                    let row = &u.as_slice()[(px * 5 + py) * 18..(px * 5 + py) * 18 + 18];
                    let mean: f32 = (0..9).map(|t| row[t * 2 + c]).sum::<f32>() / 9.0;
                    assert!((p.at3(px, py, c) - mean).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn matmul_identity_and_scalar() {
        let eye = Tensor::new(&[2, 2], vec![1.0f64, 0.0, 0.0, 1.0]).unwrap();
        let b = Tensor::new(&[2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(matmul(&eye, &b).unwrap().as_slice(), b.as_slice());

        let a = Tensor::new(&[1, 1], vec![2.0f64]).unwrap();
        let c = Tensor::new(&[1, 1], vec![3.0f64]).unwrap();
        assert_eq!(matmul(&a, &c).unwrap().as_slice(), &[6.0]);
    }

    #[test]
    fn matmul_matches_triple_loop() {
        let mut rng = crate::numerics::SeededRng::new(11);
        let a = Tensor::new(&[7, 5], (0..35).map(|_| rng.next_f32()).collect()).unwrap();
        let b = Tensor::new(&[5, 3], (0..15).map(|_| rng.next_f32()).collect()).unwrap();
        let c = matmul(&a, &b).unwrap();
        for i in 0..7 {
            for j in 0..3 {
                let mut acc = 0.0f32;
                for kk in 0..5 {
                    acc += a.as_slice()[i * 5 + kk] * b.as_slice()[kk * 3 + j];
                }
                let got = c.as_slice()[i * 3 + j];
                assert!((got - acc).abs() <= 1e-6 * acc.abs().max(1.0));
            }
        }
    }

    #[test]
    fn matmul_shape_mismatch() {
        let a = Tensor::<f32>::zeros(&[2, 3]);
        let b = Tensor::<f32>::zeros(&[4, 2]);
        assert!(matmul(&a, &b).is_err());
    }

    #[test]
    fn transposed_products_agree_with_plain() {
        let mut rng = crate::numerics::SeededRng::new(3);
        let a = Tensor::new(&[6, 4], (0..24).map(|_| rng.next_f64()).collect()).unwrap();
        let b = Tensor::new(&[6, 5], (0..30).map(|_| rng.next_f64()).collect()).unwrap();
        let atb_fast = matmul_atb(&a, &b).unwrap();
        // Explicit transpose oracle.
        let mut at = Tensor::<f64>::zeros(&[4, 6]);
        for i in 0..6 {
            for j in 0..4 {
                at.as_mut_slice()[j * 6 + i] = a.as_slice()[i * 4 + j];
            }
        }
        let atb_ref = matmul(&at, &b).unwrap();
        for (x, y) in atb_fast.as_slice().iter().zip(atb_ref.as_slice()) {
            assert!((x - y).abs() < 1e-12);
        }

        let c = Tensor::new(&[3, 5], (0..15).map(|_| rng.next_f64()).collect()).unwrap();
        let abt_fast = matmul_abt(&c, &b).unwrap();
        let mut bt = Tensor::<f64>::zeros(&[5, 6]);
        for i in 0..6 {
            for j in 0..5 {
                bt.as_mut_slice()[j * 6 + i] = b.as_slice()[i * 5 + j];
            }
        }
        let abt_ref = matmul(&c, &bt).unwrap();
        for (x, y) in abt_fast.as_slice().iter().zip(abt_ref.as_slice()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn kron3_ones_and_basis() {
        let ones = kron3(&[1.0f32, 1.0], &[1.0, 1.0, 1.0], &[1.0]).unwrap();
        assert!(ones.as_slice().iter().all(|&v| v == 1.0));

        let e0 = kron3(&[1.0f32, 0.0], &[0.5, 0.25], &[2.0]).unwrap();
        assert_eq!(e0.as_slice(), &[1.0, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn kron3_matches_nested_loop() {
        let mut rng = crate::numerics::SeededRng::new(8);
        let w1: Vec<f64> = (0..3).map(|_| rng.next_f64()).collect();
        let w2: Vec<f64> = (0..4).map(|_| rng.next_f64()).collect();
        let w3: Vec<f64> = (0..2).map(|_| rng.next_f64()).collect();
        let t = kron3(&w1, &w2, &w3).unwrap();
        for i in 0..3 {
            for j in 0..4 {
                for l in 0..2 {
                    assert_eq!(t.as_slice()[(i * 4 + j) * 2 + l], w1[i] * w2[j] * w3[l]);
                }
            }
        }
    }

    #[test]
    fn fold_is_adjoint_of_unfold() {
        // <unfold(x), p> == <x, fold(p)> for random x, p.
        let mut rng = crate::numerics::SeededRng::new(17);
        let x = Tensor::new(&[4, 5, 2], (0..40).map(|_| rng.next_f64()).collect()).unwrap();
        let (u, geom) = unfold_strided(&x, 3, 2, 1).unwrap();
        let p = Tensor::new(u.dims(), (0..u.len()).map(|_| rng.next_f64()).collect()).unwrap();
        let lhs: f64 = u.as_slice().iter().zip(p.as_slice()).map(|(a, b)| a * b).sum();
        let folded = fold_accumulate(&p, &geom).unwrap();
        let rhs: f64 = x.as_slice().iter().zip(folded.as_slice()).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }
}
