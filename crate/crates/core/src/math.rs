// Float helpers that `core` does not provide.

pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}

/// `ceil(log2(x))` for `x >= 1`, as an integer.
pub(crate) fn ceil_log2(x: usize) -> usize {
    let mut d = 0;
    while (1usize << d) < x {
        d += 1;
    }
    d
}
