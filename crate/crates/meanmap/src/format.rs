/// Human-readable number with `sig` significant digits, in the style of
/// C's `%g`: plain notation for moderate exponents, scientific otherwise,
/// trailing zeros dropped.
pub fn fmt_sig(v: f64, sig: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("`e` formatting has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt_point(x: &[f64], sig: usize) -> String {
    let parts: Vec<String> = x.iter().map(|&v| fmt_sig(v, sig)).collect();
    format!("({})", parts.join(", "))
}
