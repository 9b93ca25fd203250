use super::AnalysisError;

/// One-sided exact binomial test: P(X >= k) for X ~ Binomial(n, p0).
///
/// Terms are summed in log space (log-sum-exp), so `n` in the tens of
/// thousands neither overflows the binomial coefficients nor underflows the
/// powers of `p0`.
pub fn binomial_test(successes: u64, trials: u64, p0: f64) -> Result<f64, AnalysisError> {
    if trials == 0 {
        return Err(AnalysisError::InvalidArgument(
            "binomial test needs at least one trial".into(),
        ));
    }
    if successes > trials {
        return Err(AnalysisError::InvalidArgument(format!(
            "{successes} successes out of {trials} trials"
        )));
    }
    if !(0.0..=1.0).contains(&p0) {
        return Err(AnalysisError::InvalidArgument(format!(
            "p0 = {p0} is not a probability"
        )));
    }
    if successes == 0 || p0 == 1.0 {
        return Ok(1.0);
    }
    if p0 == 0.0 {
        return Ok(0.0);
    }

    let n = trials as usize;
    let mut ln_factorial = Vec::with_capacity(n + 1);
    ln_factorial.push(0.0f64);
    let mut acc = 0.0;
    for i in 1..=n {
        acc += (i as f64).ln();
        ln_factorial.push(acc);
    }
    let ln_p = p0.ln();
    let ln_q = (-p0).ln_1p();
    let log_terms: Vec<f64> = (successes as usize..=n)
        .map(|i| ln_factorial[n] - ln_factorial[i] - ln_factorial[n - i] + i as f64 * ln_p + (n - i) as f64 * ln_q)
        .collect();
    let max = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = log_terms.iter().map(|t| (t - max).exp()).sum();
    Ok((max + sum.ln()).exp().min(1.0))
}
