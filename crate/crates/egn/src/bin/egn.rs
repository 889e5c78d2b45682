//! Command-line front end: every computation as a subcommand emitting one
//! line of deterministic JSON on standard output.
//!
//! Exit codes: 0 on success, 2 on input validation failure (with an
//! `{"error", "detail"}` object on standard error), 64 for malformed flags.
//! Rationals read and print as `"p"` or `"p/q"`; list flags take
//! comma-separated values; `--input` files override inline flags.

use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use egn::curve::{
    alpha_from_gluing, expansion_constants, hyperelliptic_alpha, massey_report, wheel_alpha,
    ConstantsTable, HyperellipticData, NodalCurve, WheelCurve,
};
use egn::hochschild::{hh_dim_bar, hh_dim_resolution};
use egn::linalg::{phi_kernel_lattice, QMatrix};
use egn::poly::Poly;
use egn::quiver::Algebra;
use egn::rat::Rat;
use egn::reconstruct::{
    homogeneous_system_dims, moduli_map, reconstruct_constants, LinearSystemReport, MonomialValue,
};
use egn::series::ExpansionPoint;
use egn::tangent::{assemble_functionals, tangent_rank};

#[derive(Parser)]
#[command(
    name = "egn",
    version,
    about = "Exact computations for Ext-algebras of pointed nodal curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hochschild cohomology dimension at one level and internal degree.
    Hh(HhArgs),
    /// Pole expansion constants of a nodal curve.
    Alpha(AlphaArgs),
    /// Alpha matrix of a wheel of projective lines.
    Wheel(WheelArgs),
    /// Alpha matrix of a hyperelliptic branch datum, by the closed form.
    Hyperelliptic(HyperellipticArgs),
    /// Massey vanishing pattern at a smooth point of a nodal curve.
    Massey(MasseyArgs),
    /// Dimensions of the two homogeneous linear systems of an alpha matrix.
    Systems(SystemsArgs),
    /// Recover every expansion constant from an alpha matrix.
    Reconstruct(MatrixInputArgs),
    /// Rank of the deformation functionals of a nodal curve.
    Tangent(TangentArgs),
    /// Kernel monomials of the weight map evaluated on an alpha matrix.
    ModuliMap(MatrixInputArgs),
    /// Deterministic randomized self-checks.
    Selftest(SelftestArgs),
}

/// Comma-separated rationals, each `p` or `p/q`.
#[derive(Clone, Debug)]
struct RatList(Vec<Rat>);

impl FromStr for RatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|t| Rat::from_str(t).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()
            .map(RatList)
    }
}

/// Semicolon-separated rows of comma-separated rationals.
#[derive(Clone, Debug)]
struct RatMatrix(Vec<Vec<Rat>>);

impl FromStr for RatMatrix {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(';')
            .map(|row| RatList::from_str(row).map(|l| l.0))
            .collect::<Result<Vec<_>, _>>()
            .map(RatMatrix)
    }
}

#[derive(Args)]
struct CurveFlags {
    /// First node preimages a_1,...,a_g.
    #[arg(long, allow_hyphen_values = true)]
    a: RatList,
    /// Second node preimages b_1,...,b_g.
    #[arg(long, allow_hyphen_values = true)]
    b: RatList,
    /// Marked points c_1,...,c_g.
    #[arg(long, allow_hyphen_values = true)]
    c: RatList,
}

impl CurveFlags {
    fn raw(&self) -> Result<(Vec<(Rat, Rat)>, Vec<Rat>), Failure> {
        if self.a.0.len() != self.b.0.len() || self.a.0.len() != self.c.0.len() {
            return Err(fail(
                "invalid_input",
                "flags --a, --b, --c need the same length",
            ));
        }
        let nodes = self
            .a
            .0
            .iter()
            .cloned()
            .zip(self.b.0.iter().cloned())
            .collect();
        Ok((nodes, self.c.0.clone()))
    }

    fn curve(&self) -> Result<NodalCurve, Failure> {
        let (nodes, marked) = self.raw()?;
        NodalCurve::new(nodes, marked).map_err(|e| fail("curve", e))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum HhMethod {
    Resolution,
    Bar,
}

#[derive(Args)]
struct HhArgs {
    /// Genus parameter g of E(g, n).
    #[arg(long)]
    g: usize,
    /// Marked-point parameter n; defaults to g.
    #[arg(long)]
    n: Option<usize>,
    /// Cohomological level i >= 1.
    #[arg(long)]
    i: usize,
    /// Internal degree.
    #[arg(long, allow_negative_numbers = true)]
    degree: i64,
    #[arg(long, value_enum)]
    method: HhMethod,
}

#[derive(Args)]
struct AlphaArgs {
    #[command(flatten)]
    curve: CurveFlags,
    /// Emit the full table of expansion constants, not only alpha.
    #[arg(long)]
    full_constants: bool,
}

#[derive(Args)]
struct WheelArgs {
    /// Marked-point positions lambda_1,...,lambda_g.
    #[arg(long, allow_hyphen_values = true)]
    lambda: RatList,
}

#[derive(Args)]
struct HyperellipticArgs {
    /// Branch points carrying the marked Weierstrass nodes.
    #[arg(long, allow_hyphen_values = true)]
    branch: RatList,
    /// Coefficients of the branch polynomial, constant term first.
    #[arg(long, allow_hyphen_values = true)]
    poly: RatList,
}

#[derive(Args)]
struct MasseyArgs {
    #[command(flatten)]
    curve: CurveFlags,
    /// The smooth base point: a rational number or `inf`.
    #[arg(long, allow_hyphen_values = true)]
    p: String,
}

#[derive(Args)]
struct SystemsArgs {
    /// First node preimages; degenerate pairs a_k = b_k are allowed.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<RatList>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<RatList>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<RatList>,
    /// Inline alpha matrix, rows separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<RatMatrix>,
    /// JSON file holding the alpha matrix; overrides inline flags.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct MatrixInputArgs {
    /// Inline alpha matrix, rows separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<RatMatrix>,
    /// JSON file holding the alpha matrix; overrides inline flags.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct TangentArgs {
    #[command(flatten)]
    curve: CurveFlags,
    /// Include the functional vectors in the output.
    #[arg(long)]
    vectors: bool,
}

#[derive(Args)]
struct SelftestArgs {
    /// Seed for the deterministic randomized suites.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Serialize)]
struct Failure {
    error: String,
    detail: String,
}

fn fail(error: &str, detail: impl Display) -> Failure {
    Failure {
        error: error.to_string(),
        detail: detail.to_string(),
    }
}

#[derive(Serialize)]
struct HhOut {
    g: usize,
    n: usize,
    i: usize,
    internal_degree: i64,
    method: &'static str,
    dim_cochains: usize,
    dim_cocycles: usize,
    dim_coboundaries: usize,
    hh_dim: usize,
}

#[derive(Serialize)]
struct AlphaOut {
    g: usize,
    alpha: QMatrix,
}

#[derive(Serialize)]
struct FullConstantsOut {
    g: usize,
    alpha: QMatrix,
    beta: QMatrix,
    gamma: QMatrix,
    gamma_diag: Vec<Rat>,
    delta: QMatrix,
    epsilon: QMatrix,
    theta: QMatrix,
    a: QMatrix,
    b: QMatrix,
}

impl From<ConstantsTable> for FullConstantsOut {
    fn from(t: ConstantsTable) -> Self {
        FullConstantsOut {
            g: t.genus(),
            alpha: t.alpha,
            beta: t.beta,
            gamma: t.gamma,
            gamma_diag: t.gamma_diag,
            delta: t.delta,
            epsilon: t.epsilon,
            theta: t.theta,
            a: t.a,
            b: t.b,
        }
    }
}

#[derive(Serialize)]
struct WheelOut {
    g: usize,
    lambda: Vec<Rat>,
    alpha: QMatrix,
}

#[derive(Serialize)]
struct HyperellipticOut {
    g: usize,
    branch: Vec<Rat>,
    poly: Vec<Rat>,
    alpha: QMatrix,
}

#[derive(Serialize)]
struct MasseyOut {
    g: usize,
    p: String,
    h0_chain: [usize; 3],
    triple_vanishes: bool,
    quadruple_defined: bool,
    quadruple_vanishes: Option<bool>,
}

#[derive(Serialize)]
struct SystemsOut {
    g: usize,
    ct_hom: LinearSystemReport,
    acd_hom: LinearSystemReport,
}

#[derive(Serialize)]
struct TangentOut {
    g: usize,
    rank: usize,
    expected_for_generic: usize,
    vectors_emitted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    functionals: Option<Vec<Vec<Rat>>>,
}

#[derive(Serialize)]
struct ModuliMapOut {
    g: usize,
    ambient_dim: usize,
    kernel_rank: usize,
    monomials: Vec<MonomialValue>,
}

#[derive(Serialize)]
struct SelftestCheck {
    name: &'static str,
    cases: usize,
}

#[derive(Serialize)]
struct SelftestOut {
    seed: u64,
    checks: Vec<SelftestCheck>,
    all_passed: bool,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli.command) {
        Ok(json) => println!("{json}"),
        Err(f) => {
            eprintln!("{}", serde_json::to_string(&f).expect("failure serializes"));
            std::process::exit(2);
        }
    }
}

fn emit(value: &impl Serialize) -> Result<String, Failure> {
    serde_json::to_string(value).map_err(|e| fail("json", e))
}

fn run(cmd: Cmd) -> Result<String, Failure> {
    match cmd {
        Cmd::Hh(args) => hh(args),
        Cmd::Alpha(args) => alpha(args),
        Cmd::Wheel(args) => wheel(args),
        Cmd::Hyperelliptic(args) => hyperelliptic(args),
        Cmd::Massey(args) => massey(args),
        Cmd::Systems(args) => systems(args),
        Cmd::Reconstruct(args) => reconstruct(args),
        Cmd::Tangent(args) => tangent(args),
        Cmd::ModuliMap(args) => moduli(args),
        Cmd::Selftest(args) => selftest(args.seed),
    }
}

fn hh(args: HhArgs) -> Result<String, Failure> {
    let n = args.n.unwrap_or(args.g);
    Algebra::new(args.g, n).map_err(|e| fail("algebra", e))?;
    if args.i < 1 {
        return Err(fail("invalid_input", "cohomology level --i must be >= 1"));
    }
    let (method, res) = match args.method {
        HhMethod::Resolution => {
            if n != args.g {
                return Err(fail(
                    "invalid_input",
                    "the resolution method covers the self-dual case n = g only",
                ));
            }
            (
                "resolution",
                hh_dim_resolution(args.g, args.i, args.degree),
            )
        }
        HhMethod::Bar => (
            "bar",
            hh_dim_bar(args.g, n, args.i, args.degree).map_err(|e| fail("hochschild", e))?,
        ),
    };
    emit(&HhOut {
        g: args.g,
        n,
        i: args.i,
        internal_degree: args.degree,
        method,
        dim_cochains: res.dim_cochains,
        dim_cocycles: res.dim_kernel,
        dim_coboundaries: res.dim_image_in,
        hh_dim: res.hh_dimension,
    })
}

fn alpha(args: AlphaArgs) -> Result<String, Failure> {
    let curve = args.curve.curve()?;
    if args.full_constants {
        let table = expansion_constants(&curve).map_err(|e| fail("curve", e))?;
        emit(&FullConstantsOut::from(table))
    } else {
        let a = egn::curve::alpha_matrix(&curve).map_err(|e| fail("curve", e))?;
        emit(&AlphaOut {
            g: curve.genus(),
            alpha: a,
        })
    }
}

fn wheel(args: WheelArgs) -> Result<String, Failure> {
    let w = WheelCurve::new(args.lambda.0).map_err(|e| fail("curve", e))?;
    let alpha = wheel_alpha(&w).map_err(|e| fail("curve", e))?;
    emit(&WheelOut {
        g: w.genus(),
        lambda: w.lambda().to_vec(),
        alpha,
    })
}

fn hyperelliptic(args: HyperellipticArgs) -> Result<String, Failure> {
    let poly = Poly::from_coeffs(args.poly.0.clone());
    let data = HyperellipticData::new(args.branch.0, poly).map_err(|e| fail("curve", e))?;
    emit(&HyperellipticOut {
        g: data.genus(),
        branch: data.branch().to_vec(),
        poly: args.poly.0,
        alpha: hyperelliptic_alpha(&data),
    })
}

fn massey(args: MasseyArgs) -> Result<String, Failure> {
    let curve = args.curve.curve()?;
    let (p, shown) = if args.p == "inf" {
        (ExpansionPoint::Infinity, "inf".to_string())
    } else {
        let x = Rat::from_str(&args.p).map_err(|e| fail("invalid_input", e))?;
        let shown = x.to_string();
        (ExpansionPoint::Finite(x), shown)
    };
    let report = massey_report(&curve, &p).map_err(|e| fail("curve", e))?;
    emit(&MasseyOut {
        g: curve.genus(),
        p: shown,
        h0_chain: report.h0_chain,
        triple_vanishes: report.triple_vanishes,
        quadruple_defined: report.quadruple_defined,
        quadruple_vanishes: report.quadruple_vanishes,
    })
}

/// Alpha matrix from `--input` JSON (an object with an `"alpha"` field or a
/// bare array of rows), falling back to the inline `--alpha` flag.
fn alpha_from_sources(
    input: &Option<PathBuf>,
    inline: &Option<RatMatrix>,
) -> Result<QMatrix, Failure> {
    if let Some(path) = input {
        let text = std::fs::read_to_string(path).map_err(|e| fail("io", e))?;
        #[derive(Deserialize)]
        struct AlphaDoc {
            alpha: QMatrix,
        }
        if let Ok(doc) = serde_json::from_str::<AlphaDoc>(&text) {
            return Ok(doc.alpha);
        }
        return serde_json::from_str::<QMatrix>(&text).map_err(|e| fail("json", e));
    }
    let rows = inline
        .as_ref()
        .ok_or_else(|| fail("invalid_input", "provide --alpha or --input"))?;
    QMatrix::from_rows(rows.0.clone()).map_err(|e| fail("linalg", e))
}

fn systems(args: SystemsArgs) -> Result<String, Failure> {
    let alpha = if args.input.is_some() || args.alpha.is_some() {
        alpha_from_sources(&args.input, &args.alpha)?
    } else {
        let (a, b, c) = match (args.a, args.b, args.c) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                return Err(fail(
                    "invalid_input",
                    "provide --a/--b/--c, --alpha, or --input",
                ))
            }
        };
        let flags = CurveFlags { a, b, c };
        let (nodes, marked) = flags.raw()?;
        alpha_from_gluing(&nodes, &marked).map_err(|e| fail("curve", e))?
    };
    let (ct, acd) = homogeneous_system_dims(&alpha).map_err(|e| fail("reconstruct", e))?;
    emit(&SystemsOut {
        g: alpha.nrows(),
        ct_hom: ct,
        acd_hom: acd,
    })
}

fn reconstruct(args: MatrixInputArgs) -> Result<String, Failure> {
    let alpha = alpha_from_sources(&args.input, &args.alpha)?;
    let table = reconstruct_constants(&alpha).map_err(|e| fail("reconstruct", e))?;
    emit(&FullConstantsOut::from(table))
}

fn tangent(args: TangentArgs) -> Result<String, Failure> {
    let curve = args.curve.curve()?;
    let data = assemble_functionals(&curve).map_err(|e| fail("curve", e))?;
    let report = data.report(args.vectors);
    emit(&TangentOut {
        g: report.g,
        rank: report.rank,
        expected_for_generic: report.expected_for_generic,
        vectors_emitted: report.vectors_emitted,
        functionals: args.vectors.then_some(data.functionals),
    })
}

fn moduli(args: MatrixInputArgs) -> Result<String, Failure> {
    let alpha = alpha_from_sources(&args.input, &args.alpha)?;
    let g = alpha.nrows();
    let lattice = phi_kernel_lattice(g).map_err(|e| fail("linalg", e))?;
    let monomials = moduli_map(&alpha, &lattice).map_err(|e| fail("reconstruct", e))?;
    emit(&ModuliMapOut {
        g,
        ambient_dim: lattice.ambient_dim,
        kernel_rank: lattice.rank(),
        monomials,
    })
}

fn nonzero_rat(rng: &mut ChaCha8Rng) -> Rat {
    loop {
        let n = rng.gen_range(-9..=9i64);
        if n != 0 {
            return Rat::from_big(n.into(), rng.gen_range(1..=4i64).into());
        }
    }
}

fn selftest(seed: u64) -> Result<String, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let bad = |name: &str, detail: String| fail("selftest", format!("{name}: {detail}"));

    // The cyclic ratio identity of wheel alpha matrices.
    let mut cases = 0;
    for round in 0..5usize {
        let g = 4 + round % 4;
        let w = loop {
            let lambda: Vec<Rat> = (0..g)
                .map(|_| Rat::from_int(rng.gen_range(2..=40)))
                .collect();
            if let Ok(w) = WheelCurve::new(lambda) {
                break w;
            }
        };
        let alpha = wheel_alpha(&w).map_err(|e| bad("wheel_ratio_identity", e.to_string()))?;
        let l = w.lambda();
        for i in 0..g {
            let at = |r: usize, c: usize| alpha.at(r % g, c % g).clone();
            let lhs =
                at(i, i + 1).pow(2) * at(i + 1, i + 3) / (at(i, i + 2).pow(2) * at(i + 2, i + 3));
            let rhs = (&l[(i + 2) % g] - &Rat::one()) / &l[(i + 1) % g];
            if lhs != rhs {
                return Err(bad(
                    "wheel_ratio_identity",
                    format!("mismatch at genus {g}, row {i}"),
                ));
            }
        }
        cases += 1;
    }
    checks.push(SelftestCheck {
        name: "wheel_ratio_identity",
        cases,
    });

    // The bar and resolution computations agree on E(2, 2).
    let mut cases = 0;
    for i in 1..=3usize {
        let m = 2 - i as i64;
        let bar = hh_dim_bar(2, 2, i, m).map_err(|e| bad("bar_matches_resolution", e.to_string()))?;
        let res = hh_dim_resolution(2, i, m);
        if bar.hh_dimension != res.hh_dimension {
            return Err(bad(
                "bar_matches_resolution",
                format!("level {i}: bar {} vs resolution {}", bar.hh_dimension, res.hh_dimension),
            ));
        }
        cases += 1;
    }
    checks.push(SelftestCheck {
        name: "bar_matches_resolution",
        cases,
    });

    // Expansion constants of a random genus-6 curve survive the round trip
    // through their alpha matrix.
    let g = 6;
    let curve = loop {
        let mut pts: Vec<Rat> = Vec::new();
        while pts.len() < 3 * g {
            let x = Rat::from_int(rng.gen_range(-30..=30));
            if !pts.contains(&x) {
                pts.push(x);
            }
        }
        let nodes = (0..g)
            .map(|k| (pts[2 * k].clone(), pts[2 * k + 1].clone()))
            .collect();
        if let Ok(c) = NodalCurve::new(nodes, pts[2 * g..].to_vec()) {
            break c;
        }
    };
    let table = expansion_constants(&curve).map_err(|e| bad("reconstruction_round_trip", e.to_string()))?;
    let rebuilt = reconstruct_constants(&table.alpha)
        .map_err(|e| bad("reconstruction_round_trip", e.to_string()))?;
    if rebuilt != table || !table.satisfies_relations() {
        return Err(bad(
            "reconstruction_round_trip",
            "recovered table differs from the expansion constants".to_string(),
        ));
    }
    checks.push(SelftestCheck {
        name: "reconstruction_round_trip",
        cases: 1,
    });

    // Functional ranks ignore affine reparametrizations of the line.
    let base_curve = NodalCurve::new(
        (1..=4i64)
            .map(|k| (Rat::from_int(k), Rat::from_int(4 + k)))
            .collect(),
        (1..=4i64).map(|k| Rat::from_int(-k)).collect(),
    )
    .expect("integer curve data is distinct");
    let base = tangent_rank(&base_curve).map_err(|e| bad("tangent_affine_invariance", e.to_string()))?;
    let mut cases = 0;
    for _ in 0..2 {
        let u = nonzero_rat(&mut rng);
        let v = Rat::from_big(
            rng.gen_range(-9..=9i64).into(),
            rng.gen_range(1..=4i64).into(),
        );
        let moved = NodalCurve::new(
            base_curve
                .nodes()
                .iter()
                .map(|(a, b)| (&u * a + &v, &u * b + &v))
                .collect(),
            base_curve.marked().iter().map(|c| &u * c + &v).collect(),
        )
        .expect("affine maps preserve distinctness");
        let rank = tangent_rank(&moved).map_err(|e| bad("tangent_affine_invariance", e.to_string()))?;
        if rank != base {
            return Err(bad(
                "tangent_affine_invariance",
                format!("rank {rank} after reparametrization, expected {base}"),
            ));
        }
        cases += 1;
    }
    checks.push(SelftestCheck {
        name: "tangent_affine_invariance",
        cases,
    });

    // Kernel monomials ignore the rescaling alpha_ij <- l_i^2 l_j^{-1} alpha_ij.
    let g = 4;
    let lattice = phi_kernel_lattice(g).map_err(|e| bad("moduli_rescale_invariance", e.to_string()))?;
    let mut cases = 0;
    for _ in 0..3 {
        let alpha = QMatrix::from_fn(g, g, |i, j| {
            if i == j {
                Rat::zero()
            } else {
                nonzero_rat(&mut rng)
            }
        });
        let l: Vec<Rat> = (0..g).map(|_| nonzero_rat(&mut rng)).collect();
        let rescaled = QMatrix::from_fn(g, g, |i, j| {
            if i == j {
                Rat::zero()
            } else {
                &l[i] * &l[i] / &l[j] * alpha.at(i, j)
            }
        });
        let before = moduli_map(&alpha, &lattice)
            .map_err(|e| bad("moduli_rescale_invariance", e.to_string()))?;
        let after = moduli_map(&rescaled, &lattice)
            .map_err(|e| bad("moduli_rescale_invariance", e.to_string()))?;
        if before != after {
            return Err(bad(
                "moduli_rescale_invariance",
                "monomial values moved under a kernel-trivial rescaling".to_string(),
            ));
        }
        cases += 1;
    }
    checks.push(SelftestCheck {
        name: "moduli_rescale_invariance",
        cases,
    });

    emit(&SelftestOut {
        seed,
        checks,
        all_passed: true,
    })
}
