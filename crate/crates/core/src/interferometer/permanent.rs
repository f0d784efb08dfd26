use nalgebra::DMatrix;
use num_complex::Complex64;

/// Permanent by Ryser's formula with Gray-code subset updates, O(2ⁿ·n).
/// The empty matrix has permanent 1.
///
/// # Panics
///
/// If the matrix is not square or has 64 or more rows.
pub fn permanent(a: &DMatrix<Complex64>) -> Complex64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "permanent of a non-square matrix");
    assert!(n < 64, "permanent of a {n}x{n} matrix is out of reach");
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }

    // per(A) = (−1)^n Σ_{S ⊆ cols} (−1)^{|S|} ∏_i Σ_{j∈S} a_ij
    let mut row_sums = vec![Complex64::default(); n];
    let mut in_subset = vec![false; n];
    let mut total = Complex64::default();
    let mut size = 0usize;
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        if in_subset[j] {
            in_subset[j] = false;
            size -= 1;
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= a[(i, j)];
            }
        } else {
            in_subset[j] = true;
            size += 1;
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += a[(i, j)];
            }
        }
        let prod = row_sums.iter().fold(Complex64::new(1.0, 0.0), |acc, s| acc * s);
        if size.is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}
