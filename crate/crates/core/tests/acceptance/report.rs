use std::sync::atomic::{AtomicUsize, Ordering};

pub static FAILED: AtomicUsize = AtomicUsize::new(0);

/// Prints one verdict line for a criterion.
pub fn verdict(criterion: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("{tag} | {criterion} | {detail}");
    if !pass {
        FAILED.fetch_add(1, Ordering::SeqCst);
    }
}
