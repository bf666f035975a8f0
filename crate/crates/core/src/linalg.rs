//! Dense factorizations backed by the system LAPACK.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Thin SVD `a = u diag(s) vt`, singular values nonincreasing.
pub(crate) struct Svd {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub vt: DMatrix<f64>,
}

fn dim(n: usize) -> i32 {
    i32::try_from(n).expect("matrix dimension exceeds LAPACK's integer range")
}

pub(crate) fn thin_svd(a: &DMatrix<f64>) -> Result<Svd> {
    // divide and conquer first; the QR-iteration driver if it fails to converge
    match gesdd(a.clone()) {
        Ok(svd) => Ok(svd),
        Err(_) => gesvd(a.clone()),
    }
}

fn svd_buffers(m: usize, n: usize) -> Svd {
    let k = m.min(n);
    Svd { u: DMatrix::zeros(m, k), s: vec![0.0; k], vt: DMatrix::zeros(k, n) }
}

fn gesdd(mut a: DMatrix<f64>) -> Result<Svd> {
    let (m, n) = a.shape();
    let mut out = svd_buffers(m, n);
    let (mm, nn, kk) = (dim(m), dim(n), dim(m.min(n)));
    let mut iwork = vec![0i32; 8 * m.min(n)];
    let mut info = 0;
    let mut query = [0.0];
    let jobz = b'S' as std::os::raw::c_char;
    for pass in 0..2 {
        let mut work = vec![0.0; if pass == 0 { 0 } else { query[0] as usize }];
        let (ptr, lwork) = if pass == 0 { (query.as_mut_ptr(), -1) } else { (work.as_mut_ptr(), work.len() as i32) };
        // SAFETY: every buffer is sized per the LAPACK contract for jobz = 'S'.
        unsafe {
            lapack_sys::dgesdd_(
                &jobz,
                &mm,
                &nn,
                a.as_mut_ptr(),
                &mm,
                out.s.as_mut_ptr(),
                out.u.as_mut_ptr(),
                &mm,
                out.vt.as_mut_ptr(),
                &kk,
                ptr,
                &lwork,
                iwork.as_mut_ptr(),
                &mut info,
            );
        }
        if info != 0 {
            return Err(Error::CorruptState(format!("dgesdd failed with info {info}")));
        }
    }
    Ok(out)
}

fn gesvd(mut a: DMatrix<f64>) -> Result<Svd> {
    let (m, n) = a.shape();
    let mut out = svd_buffers(m, n);
    let (mm, nn, kk) = (dim(m), dim(n), dim(m.min(n)));
    let mut info = 0;
    let mut query = [0.0];
    let job = b'S' as std::os::raw::c_char;
    for pass in 0..2 {
        let mut work = vec![0.0; if pass == 0 { 0 } else { query[0] as usize }];
        let (ptr, lwork) = if pass == 0 { (query.as_mut_ptr(), -1) } else { (work.as_mut_ptr(), work.len() as i32) };
        // SAFETY: as in gesdd.
        unsafe {
            lapack_sys::dgesvd_(
                &job,
                &job,
                &mm,
                &nn,
                a.as_mut_ptr(),
                &mm,
                out.s.as_mut_ptr(),
                out.u.as_mut_ptr(),
                &mm,
                out.vt.as_mut_ptr(),
                &kk,
                ptr,
                &lwork,
                &mut info,
            );
        }
        if info != 0 {
            return Err(Error::CorruptState(format!("SVD did not converge (dgesvd info {info})")));
        }
    }
    Ok(out)
}

/// Thin QR: `q` is `m x min(m, n)` with orthonormal columns, `r` is
/// `min(m, n) x n` upper trapezoidal.
pub(crate) fn thin_qr(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let (m, n) = a.shape();
    let k = m.min(n);
    let (mm, nn, kk) = (dim(m), dim(n), dim(k));
    let mut f = a.clone();
    let mut tau = vec![0.0; k];
    let mut info = 0;

    let mut query = [0.0];
    // SAFETY: workspace query, then the factorization with the size it asked for.
    unsafe {
        lapack_sys::dgeqrf_(&mm, &nn, f.as_mut_ptr(), &mm, tau.as_mut_ptr(), query.as_mut_ptr(), &-1, &mut info);
        let mut work = vec![0.0; query[0] as usize];
        lapack_sys::dgeqrf_(
            &mm,
            &nn,
            f.as_mut_ptr(),
            &mm,
            tau.as_mut_ptr(),
            work.as_mut_ptr(),
            &(work.len() as i32),
            &mut info,
        );
    }
    assert_eq!(info, 0, "dgeqrf rejected its arguments");
    let r = DMatrix::from_fn(k, n, |i, j| if i <= j { f[(i, j)] } else { 0.0 });

    let mut q = f.columns(0, k).into_owned();
    // SAFETY: q holds the k reflectors produced above.
    unsafe {
        lapack_sys::dorgqr_(&mm, &kk, &kk, q.as_mut_ptr(), &mm, tau.as_ptr(), query.as_mut_ptr(), &-1, &mut info);
        let mut work = vec![0.0; query[0] as usize];
        lapack_sys::dorgqr_(
            &mm,
            &kk,
            &kk,
            q.as_mut_ptr(),
            &mm,
            tau.as_ptr(),
            work.as_mut_ptr(),
            &(work.len() as i32),
            &mut info,
        );
    }
    assert_eq!(info, 0, "dorgqr rejected its arguments");
    (q, r)
}
