//! Release acceptance gate.
//!
//! One test per shipping criterion, each printing a single `PASS`/`FAIL`
//! line (visible under `--nocapture`). The numeric criteria read a shared,
//! single run of the full verification suite, so the gate observes exactly
//! what `symspace verify --suite all` ships — same check names, trial
//! counts, and tolerances. The demo and budget criteria drive the installed
//! binary itself.

use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use symspace::verify::{run_suite, CheckResult, PropertyReport};

const SEED: u64 = 7;
const BASE_TRIALS: usize = 100;

/// The one full-suite run shared by every numeric criterion.
fn full_report() -> &'static PropertyReport {
    static REPORT: OnceLock<PropertyReport> = OnceLock::new();
    REPORT.get_or_init(|| {
        run_suite("all", SEED, BASE_TRIALS, 1).expect("the full verification suite runs")
    })
}

fn check(name: &str) -> &'static CheckResult {
    full_report()
        .checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("suite is missing a check named {name}"))
}

/// Asserts that every named check passed with exactly the trial count and
/// tolerance the criterion pins, and prints the criterion's verdict line.
fn gate(label: &str, expectations: &[(&str, usize, f64)]) {
    let mut failures = Vec::new();
    for &(name, trials, tolerance) in expectations {
        let c = check(name);
        if !c.passed {
            failures.push(format!("{name} failed: max_error {:.3e}", c.max_error));
        }
        if c.trials != trials {
            failures.push(format!("{name} ran {} trials, pinned {trials}", c.trials));
        }
        if c.tolerance != tolerance {
            failures.push(format!(
                "{name} tolerance {:.3e}, pinned {tolerance:.3e}",
                c.tolerance
            ));
        }
    }
    if failures.is_empty() {
        println!("PASS — {label}");
    } else {
        println!("FAIL — {label}: {}", failures.join("; "));
    }
    assert!(failures.is_empty(), "{label}: {}", failures.join("; "));
}

fn binary() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_symspace"));
    // Insulate from ambient configuration so the gate checks pure defaults.
    cmd.env_remove("SYMSPACE_SEED");
    cmd
}

#[test]
fn busemann_closed_forms_match_limit_oracles() {
    gate(
        "Busemann closed forms vs limit oracle (ball t=40; decay + ray elsewhere)",
        &[
            ("ball_busemann_limit_t40", 100, 1e-8),
            ("ball_busemann_ray", 100, 1e-12),
            ("pem_busemann_limit_decay", 100, 0.6),
            ("pem_busemann_ray_exact", 100, 1e-12),
            ("gi_busemann_limit_decay", 100, 0.6),
            ("gi_busemann_ray_exact", 100, 1e-12),
        ],
    );
    // The limit oracles share the suite run; the whole suite finishing
    // inside this budget bounds them a fortiori.
    let elapsed = full_report().elapsed_ms;
    assert!(
        elapsed < 10_000,
        "oracle checks took {elapsed} ms, budget 10 s"
    );
}

#[test]
fn translated_norm_matches_log_eigenvalue_form() {
    gate(
        "gi_norm(ominus(x) oplus y) equals half the log-eigenvalue Frobenius norm",
        &[("gi_inner_translate_norm", 200, 1e-10)],
    );
}

#[test]
fn inner_product_is_rotation_invariant() {
    gate(
        "gi_inner is invariant under conjugation by orthogonal matrices",
        &[("gi_inner_k_invariance", 200, 1e-10)],
    );
}

#[test]
fn pullback_two_path_agreement() {
    gate(
        "b_distance_pem closed form equals the definitional pipeline (log and power maps)",
        &[
            ("pem_b_distance_two_path_log", 200, 1e-12),
            ("pem_b_distance_two_path_power", 200, 1e-12),
        ],
    );
}

#[test]
fn g_invariant_two_path_agreement() {
    gate(
        "b_distance_gi closed form equals the definitional pipeline with random frames",
        &[("gi_b_distance_two_path", 200, 1e-8)],
    );
}

#[test]
fn iwasawa_cholesky_matches_qr_oracle() {
    gate(
        "Iwasawa log-A part: Cholesky route equals the QR oracle at cond <= 1e4",
        &[("gi_iwasawa_cholesky_vs_qr", 500, 1e-10)],
    );
}

#[test]
fn orthonormal_boundary_directions_sit_sqrt_two_apart() {
    gate(
        "angular metric estimate on standard-basis direction pairs equals sqrt(2)",
        &[("gi_angular_orthonormal", 100, 1e-12)],
    );
}

#[test]
fn fc_layers_round_trip_their_coordinates() {
    gate(
        "FC layers recover their per-axis coordinates from the forward output",
        &[
            ("gi_fc_round_trip", 100, 1e-8),
            ("pem_fc_round_trip", 100, 1e-10),
        ],
    );
}

#[test]
fn attention_is_permutation_equivariant_on_the_simplex() {
    gate(
        "attention weights form a simplex and commute with token permutations",
        &[
            ("attn_perm_equivariance_le", 100, 1e-10),
            ("attn_perm_equivariance_gi", 100, 1e-10),
            ("attn_weight_simplex_le", 100, 1e-12),
            ("attn_weight_simplex_gi", 100, 1e-12),
        ],
    );
}

#[test]
fn ball_distance_identities_hold() {
    gate(
        "artanh/acosh distance forms, Lorentz isometry, and exp/log round trips agree",
        &[
            ("ball_dist_artanh_acosh", 100, 1e-10),
            ("ball_lorentz_isometry", 100, 1e-9),
            ("ball_exp_log_round_trip", 100, 1e-12),
        ],
    );
}

#[test]
fn signed_distance_matches_projection_search() {
    gate(
        "g-distance agrees with the golden-section geodesic-projection oracle",
        &[("ball_g_distance_projection", 20, 1e-3)],
    );
}

#[test]
fn demo_trains_every_head_kind_past_ninety_percent() {
    let mut lines = Vec::new();
    for kind in ["g", "h", "b"] {
        let start = Instant::now();
        let output = binary()
            .args(["demo", "mlr", "--distance", kind])
            .output()
            .expect("demo subprocess spawns");
        let secs = start.elapsed().as_secs_f64();
        assert!(
            output.status.success(),
            "demo mlr --distance {kind} exited {:?}: {}",
            output.status.code(),
            String::from_utf8_lossy(&output.stderr)
        );
        let stdout = String::from_utf8_lossy(&output.stdout);
        let accuracy: f64 = stdout
            .lines()
            .rev()
            .find_map(|l| l.strip_prefix("final train accuracy: "))
            .expect("demo prints a final accuracy line")
            .trim()
            .parse()
            .expect("accuracy parses as a float");
        assert!(
            accuracy >= 0.90,
            "head kind {kind} reached only {accuracy:.4} train accuracy"
        );
        assert!(
            secs < 60.0,
            "head kind {kind} took {secs:.1} s, budget 60 s"
        );
        lines.push(format!("{kind}={accuracy:.4} ({secs:.1}s)"));
    }
    println!(
        "PASS — demo mlr reaches >= 90% train accuracy for every head kind: {}",
        lines.join(", ")
    );
}

#[test]
fn full_verification_fits_the_single_thread_budget() {
    let start = Instant::now();
    let status = binary()
        .args(["verify", "--suite", "all", "--threads", "1"])
        .status()
        .expect("verify subprocess spawns");
    let secs = start.elapsed().as_secs_f64();
    let ok = status.success() && secs < 120.0;
    println!(
        "{} — verify --suite all single-threaded exits 0 in {secs:.1} s (budget 120 s)",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(status.success(), "verify exited {:?}", status.code());
    assert!(secs < 120.0, "verify took {secs:.1} s, budget 120 s");
}
