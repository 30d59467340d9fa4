//! Paired signed-rank tests on per-run errors and summary statistics in the
//! table format used by the harness.

use mlshade::harness::{format_sci, summarize, wilcoxon_signed_rank};

fn main() -> mlshade::Result<()> {
    let a = [0.0, 0.99, 0.0, 1.99, 0.0, 0.0, 2.98, 0.99, 0.0, 0.0];
    let b = [2.98, 3.97, 1.99, 4.97, 2.98, 0.99, 5.97, 3.98, 1.99, 2.99];

    for (name, v) in [("a", &a), ("b", &b)] {
        let s = summarize(v)?;
        println!(
            "{name}: best {} worst {} median {} mean {} std {}",
            format_sci(s.best), format_sci(s.worst), format_sci(s.median), format_sci(s.mean), format_sci(s.std)
        );
    }
    let w = wilcoxon_signed_rank(&a, &b, 0.05)?;
    println!("a vs b: W+ {} W- {} p {:.6} ({}) -> {}", w.w_plus, w.w_minus, w.p_value, if w.exact { "exact" } else { "normal" }, w.verdict);
    let w = wilcoxon_signed_rank(&a, &a, 0.05)?;
    println!("a vs a: {} nonzero differences -> {}{}", w.n, w.verdict, if w.insufficient { " (insufficient data)" } else { "" });
    Ok(())
}
