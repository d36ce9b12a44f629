//! Compares two language orderings with Spearman's rho and Kendall's tau.

use codeppl::analysis::rank_correlation;

fn main() {
    let languages = ["C#", "Java", "Ruby", "Go", "Python", "C", "Perl", "R", "C++"];
    // Lower is better in both columns.
    let ours = [2.1, 2.2, 2.4, 2.5, 2.7, 2.9, 3.3, 3.4, 3.6];
    let theirs = [3.0, 1.0, 5.0, 4.0, 2.0, 6.0, 9.0, 8.0, 7.0];
    for (l, (a, b)) in languages.iter().zip(ours.iter().zip(&theirs)) {
        println!("{l:>7} {a:>5} {b:>3}");
    }
    let r = rank_correlation(&ours, &theirs).expect("valid rankings");
    println!("n = {}", r.n);
    println!("spearman rho = {:.4}  p = {:.4}", r.rho, r.p_rho);
    println!("kendall  tau = {:.4}  p = {:.4}", r.tau, r.p_tau);

    let small = rank_correlation(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap();
    println!("exact test, n = 4: rho {} (p {:.4}), tau {:.4} (p {:.4})", small.rho, small.p_rho, small.tau, small.p_tau);
}
