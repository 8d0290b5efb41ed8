//! Subcommands. Each returns its full output as a string so runs can be compared byte for byte.

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use skewk_core::abgroup::{AbGroup, Automorphism, GroupRingElem};
use skewk_core::ff::DEFAULT_MAX_FIELD_SIZE;
use skewk_core::ktheory::{
    k_f_completed, k_finite_field, k_rep_groups, l_complete, stability_check, FgAbGroup,
    LComplGroup, StabilityReport,
};
use skewk_core::oracle::{analyze, compare};
use skewk_core::skewring::{
    colimit_k0, decompose, k0_ring, tower_level_with_twist, Decomposition, K0Ring, Multiset,
    Orbit, SkewRingDesc,
};
use skewk_core::ss::{e1_page, verify_main, E1Page, MainReport, Verdict};

use crate::config::{CliError, Config, Format};
use crate::grid::{run_grid, GridReport};

#[derive(Debug, Parser)]
#[command(name = "skewk", version, about = "Skew group rings, their K_0 rings and l-adic K-groups")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Fields up to this size use lookup tables.
    #[arg(long, global = true, env = "SKEWK_MAX_FIELD_SIZE", default_value_t = DEFAULT_MAX_FIELD_SIZE)]
    pub max_field_size: u64,
    /// Largest algebra dimension the oracle will build.
    #[arg(long, global = true, env = "SKEWK_MAX_ORACLE_DIM", default_value_t = 256)]
    pub max_oracle_dim: u64,
    #[arg(long, global = true, env = "SKEWK_FORMAT", value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct DescArgs {
    #[arg(short = 'p')]
    pub p: u64,
    #[arg(short = 'f', default_value_t = 1)]
    pub f: u32,
    #[arg(short = 'n', default_value_t = 1)]
    pub n: u32,
    /// Cyclic factor orders of N, comma separated; `1` is the trivial group.
    #[arg(short = 'N', default_value = "1")]
    pub group: String,
    /// A unit acting as a scalar, or a matrix with rows separated by `;`, e.g. `1,0;0,3`.
    #[arg(long)]
    pub theta: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wedderburn decomposition of E<N x| Z/n> over F = GF(p^f).
    Decompose {
        #[command(flatten)]
        desc: DescArgs,
        /// Also build the algebra and compare with the independent decomposition.
        #[arg(long)]
        oracle: bool,
    },
    /// K_0 as a based ring with its structure constants.
    K0 {
        #[command(flatten)]
        desc: DescArgs,
    },
    /// One level of the tame tower Z/l^i x| Z/l^i'.
    Tower {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'l')]
        l: u64,
        #[arg(short = 'i')]
        i: u32,
        /// Action of the Frobenius lift on Z/l^i; defaults to p.
        #[arg(long)]
        twist: Option<u64>,
    },
    /// K_0 of the tower levels 1..=imax and the transition maps between them.
    Colimit {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'l')]
        l: u64,
        #[arg(long, default_value_t = 3)]
        imax: u32,
    },
    /// K-groups of GF(p^d), their l-completions and the completed K-groups of the closure.
    Kgroups {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'd', default_value_t = 1)]
        d: u32,
        #[arg(short = 'l')]
        l: Option<u64>,
        #[arg(long, default_value_t = 8)]
        nmax: u32,
        /// Also report K_n of representations of the level-imax quotient.
        #[arg(long, requires = "l")]
        imax: Option<u32>,
    },
    /// Pairs (j, m) where passing to GF(p^m) changes the l-part of K_{2j-1}.
    Stability {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'l')]
        l: u64,
        #[arg(long, default_value_t = 6)]
        jmax: u32,
        #[arg(long, default_value_t = 10)]
        mmax: u32,
    },
    /// The E_1 page over a window of rows.
    E1page {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'l')]
        l: u64,
        #[arg(long, default_value_t = -4, allow_hyphen_values = true)]
        tmin: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        tmax: i64,
    },
    /// Degreewise comparison of the derived completion with the completed K-groups.
    VerifyMain {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'l')]
        l: u64,
        #[arg(long, default_value_t = 20)]
        nmax: u32,
        /// Also render the E_1 page down to row -DEPTH.
        #[arg(long, value_name = "DEPTH", num_args = 0..=1, default_missing_value = "4")]
        e1: Option<u32>,
    },
    /// Runs every descriptor of the grid through both decompositions.
    OracleGrid {
        #[arg(long, env = "SKEWK_GRID_PRIMES", value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        #[arg(long, env = "SKEWK_GRID_FMAX")]
        fmax: Option<u32>,
        #[arg(long, env = "SKEWK_GRID_NMAX")]
        nmax: Option<u32>,
        #[arg(long, env = "SKEWK_GRID_ORDER_MAX")]
        order_max: Option<u64>,
        /// Worker threads; 0 uses every core.
        #[arg(long, env = "SKEWK_THREADS", default_value_t = 0)]
        threads: usize,
        /// Skip the tensor product comparison.
        #[arg(long)]
        no_tensors: bool,
    },
}

/// What a run prints and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            stderr: String::new(),
            code: 0,
        }
    }

    fn error(e: &CliError) -> Self {
        Outcome {
            stdout: String::new(),
            stderr: format!("{e}\n"),
            code: e.exit,
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
                Outcome {
                    stdout: String::new(),
                    stderr: format!("error: BAD_ARGUMENT: {first}\n{text}"),
                    code: 2,
                }
            } else {
                Outcome::ok(text)
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let mut config = Config {
        max_field_size: g.max_field_size,
        max_oracle_dim: g.max_oracle_dim,
        format: if g.json { Format::Json } else { g.format },
        ..Config::default()
    };
    if let Command::OracleGrid {
        primes,
        fmax,
        nmax,
        order_max,
        ..
    } = &cli.command
    {
        let b = &mut config.grid;
        if let Some(p) = primes {
            b.primes = p.clone();
        }
        b.f_max = fmax.unwrap_or(b.f_max);
        b.n_max = nmax.unwrap_or(b.n_max);
        b.order_max = order_max.unwrap_or(b.order_max);
    }
    match config.validate().and_then(|_| dispatch(&cli.command, &config)) {
        Ok(o) => o,
        Err(e) => Outcome::error(&e),
    }
}

fn dispatch(cmd: &Command, cfg: &Config) -> Result<Outcome, CliError> {
    let json = cfg.format == Format::Json;
    match cmd {
        Command::Decompose { desc, oracle } => cmd_decompose(desc, *oracle, cfg),
        Command::K0 { desc } => {
            let d = parse_desc(desc)?;
            let k0 = k0_ring(&d)?;
            Ok(Outcome::ok(if json {
                line(&k0_json(&d, &k0))
            } else {
                k0_text(&d, &k0)
            }))
        }
        Command::Tower { p, l, i, twist } => {
            let lvl = tower_level_with_twist(*p, *l, *i, twist.unwrap_or(*p))?;
            let basis = lvl.k0.rank();
            Ok(Outcome::ok(if json {
                line(&json!({
                    "p": lvl.p,
                    "l": lvl.l,
                    "i": lvl.i,
                    "i_prime": lvl.i_prime,
                    "galois_degree": lvl.galois_degree,
                    "twist": lvl.twist,
                    "delta_order": lvl.delta_order,
                    "N": lvl.group.factors(),
                    "orbits": orbits_json(&lvl.orbits),
                    "all_singletons": lvl.all_singletons(),
                    "basis": basis,
                    "group_ring": lvl.k0.is_group_ring_of_characters(),
                }))
            } else {
                let mut s = format!("tower level i={} for p={} l={}\n", lvl.i, lvl.p, lvl.l);
                s += &format!("i' = {}\n", lvl.i_prime);
                s += &format!("ord_{}({}) = {}\n", lvl.group.exponent(), lvl.p, lvl.galois_degree);
                s += &format!(
                    "G = {} x| Z/{}, generator acting by x{}\n",
                    lvl.group, lvl.delta_order, lvl.twist
                );
                s += &format!(
                    "orbits: {} ({})\n",
                    lvl.orbits.len(),
                    if lvl.all_singletons() { "all singletons" } else { "not all singletons" }
                );
                s += &format!("basis {basis}\n");
                if lvl.k0.is_group_ring_of_characters() {
                    s += &format!("K0 = ℤ[{}]\n", unicode_group(&lvl.group));
                }
                s
            }))
        }
        Command::Colimit { p, l, imax } => cmd_colimit(*p, *l, *imax, json),
        Command::Kgroups { p, d, l, nmax, imax } => cmd_kgroups(*p, *d, *l, *nmax, *imax, json),
        Command::Stability { p, l, jmax, mmax } => {
            let r = stability_check(*p, *l, *jmax, *mmax)?;
            Ok(Outcome::ok(if json {
                line(&stability_json(&r))
            } else {
                stability_text(&r)
            }))
        }
        Command::E1page { p, l, tmin, tmax } => {
            let page = e1_page(*p, *l, *tmin, *tmax)?;
            Ok(Outcome::ok(if json {
                line(&page_json(&page))
            } else {
                format!("E_1 page for p={} l={}, q={}\n{}", page.p, page.l, page.q, page.render())
            }))
        }
        Command::VerifyMain { p, l, nmax, e1 } => {
            let r = verify_main(*p, *l, *nmax)?;
            let page = e1.map(|depth| e1_page(*p, *l, -(depth as i64), 0)).transpose()?;
            let stdout = if json {
                let mut v = main_json(&r);
                if let Some(pg) = &page {
                    v["e1"] = page_json(pg);
                }
                line(&v)
            } else {
                let mut s = main_text(&r);
                if let Some(pg) = &page {
                    s += &format!("E_1 page, q={}\n{}", pg.q, pg.render());
                }
                s
            };
            Ok(Outcome {
                stdout,
                stderr: String::new(),
                code: if r.verdict == Verdict::Fail { 1 } else { 0 },
            })
        }
        Command::OracleGrid {
            threads,
            no_tensors,
            ..
        } => {
            let mut ocfg = cfg.oracle();
            ocfg.tensors = !no_tensors;
            let report = if *threads == 1 {
                run_grid(&cfg.grid, &ocfg, false)
            } else {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(*threads)
                    .build()
                    .map_err(|e| CliError::invalid("BAD_CONFIG", e.to_string()))?;
                pool.install(|| run_grid(&cfg.grid, &ocfg, true))
            };
            Ok(Outcome {
                stdout: if json { grid_json(&report) } else { grid_text(&report) },
                stderr: String::new(),
                code: if report.all_agree() { 0 } else { 1 },
            })
        }
    }
}

fn line(v: &Value) -> String {
    format!("{v}\n")
}

/// `"2,4"` or `"2x4"` to `Z/2 x Z/4`; `"1"` or `""` is trivial.
pub fn parse_group(s: &str) -> Result<AbGroup, CliError> {
    let s = s.trim();
    if s.is_empty() || s == "1" {
        return Ok(AbGroup::trivial());
    }
    let factors = s
        .split([',', 'x'])
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| CliError::invalid("BAD_ARGUMENT", format!("bad group factor {t:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AbGroup::new(factors.into_iter().filter(|&m| m != 1).collect())?)
}

/// A scalar `u`, or rows separated by `;` with entries separated by `,`.
pub fn parse_theta(group: &AbGroup, s: Option<&str>) -> Result<Automorphism, CliError> {
    let Some(s) = s.map(str::trim) else {
        return Ok(Automorphism::identity(group));
    };
    let bad = |t: &str| CliError::invalid("BAD_ARGUMENT", format!("bad theta entry {t:?}"));
    if !s.contains([',', ';']) {
        let u = s.parse::<u64>().map_err(|_| bad(s))?;
        return Ok(Automorphism::scalar(group, u)?);
    }
    let matrix = s
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|t| t.trim().parse::<u64>().map_err(|_| bad(t)))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Automorphism::new(group.clone(), matrix)?)
}

pub fn parse_desc(a: &DescArgs) -> Result<SkewRingDesc, CliError> {
    let group = parse_group(&a.group)?;
    let theta = parse_theta(&group, a.theta.as_deref())?;
    Ok(SkewRingDesc::new(a.p, a.f, a.n, group, theta)?)
}

fn unicode_group(g: &AbGroup) -> String {
    if g.factors().is_empty() {
        return "1".into();
    }
    g.factors()
        .iter()
        .map(|m| format!("ℤ/{m}"))
        .collect::<Vec<_>>()
        .join(" × ")
}

fn desc_json(d: &SkewRingDesc) -> Value {
    json!({
        "p": d.p(),
        "f": d.f(),
        "n": d.n(),
        "N": d.group().factors(),
        "theta": d.theta().matrix(),
    })
}

fn orbits_json(orbits: &[Orbit]) -> Value {
    orbits
        .iter()
        .map(|o| o.characters.iter().map(|c| c.0.clone()).collect::<Vec<_>>())
        .collect()
}

fn orbit_text(o: &Orbit) -> String {
    let parts: Vec<String> = o.characters.iter().map(|c| c.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

fn decomposition_json(dec: &Decomposition) -> Value {
    let orbits: Vec<Orbit> = dec.factors.iter().map(|w| w.orbit.clone()).collect();
    json!({
        "desc": desc_json(&dec.desc),
        "orbits": orbits_json(&orbits),
        "factors": dec.factors.iter().map(|w| json!({
            "d": w.matrix_size,
            "center_degree": w.center_degree,
            "multiplicity": w.multiplicity,
        })).collect::<Vec<_>>(),
        "dim_check": dec.dimension_check(),
    })
}

fn decomposition_text(dec: &Decomposition) -> String {
    let d = &dec.desc;
    let mut s = format!("{d}\n");
    s += &format!(
        "F = GF({}^{}), E = GF({}^{}), |G| = {}, dim_F = {}\n",
        d.p(),
        d.f(),
        d.p(),
        d.e_degree(),
        d.group_order(),
        d.dim_over_f()
    );
    for w in &dec.factors {
        s += &format!(
            "factor {}: M({}, GF({}^{})) d={} [Z:F]={} m={} orbit {}\n",
            w.label,
            w.matrix_size,
            d.p(),
            d.f() * w.center_degree,
            w.matrix_size,
            w.center_degree,
            w.multiplicity,
            orbit_text(&w.orbit)
        );
    }
    let total: u64 = dec
        .factors
        .iter()
        .map(|w| (w.matrix_size as u64).pow(2) * w.center_degree as u64)
        .sum();
    s += &format!(
        "dim_check: {} (sum d^2 [Z:F] = {}, [E:F] |G| = {})\n",
        if dec.dimension_check() { "ok" } else { "FAILED" },
        total,
        d.dim_over_f()
    );
    s
}

fn cmd_decompose(a: &DescArgs, oracle: bool, cfg: &Config) -> Result<Outcome, CliError> {
    let desc = parse_desc(a)?;
    let dec = decompose(&desc);
    let json = cfg.format == Format::Json;
    let mut v = decomposition_json(&dec);
    let mut text = decomposition_text(&dec);
    let mut agree = dec.dimension_check();
    if oracle {
        let k0 = k0_ring(&desc)?;
        let report = analyze(&desc, &cfg.oracle())?;
        let agreement = compare(&dec, Some(&k0), &report);
        agree &= agreement.all();
        v["oracle"] = json!({
            "agree": agreement.all(),
            "algebra_dim": report.algebra_dim,
            "center_dim": report.center_dim,
            "notes": agreement.notes,
        });
        text += &format!(
            "oracle: {} (algebra dim {}, center dim {})\n",
            if agreement.all() { "agree" } else { "DISAGREE" },
            report.algebra_dim,
            report.center_dim
        );
        for n in &agreement.notes {
            text += &format!("  {n}\n");
        }
    }
    Ok(Outcome {
        stdout: if json { line(&v) } else { text },
        stderr: String::new(),
        code: if agree { 0 } else { 1 },
    })
}

fn ring_elem_text(a: &GroupRingElem) -> String {
    let parts: Vec<String> = a
        .terms()
        .map(|(chi, c)| if c == 1 { chi.to_string() } else { format!("{c} {chi}") })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn multiset_text(m: &Multiset) -> String {
    let parts: Vec<String> = m
        .iter()
        .map(|(&z, &r)| if r == 1 { format!("V{z}") } else { format!("{r} V{z}") })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn k0_text(d: &SkewRingDesc, k0: &K0Ring) -> String {
    let mut s = format!("K0 of {d}\n");
    s += &format!("rank {}, unit V{}\n", k0.rank(), k0.unit_label());
    for (w, r) in k0.factors.iter().zip(&k0.rho_images) {
        s += &format!("V{}: rho = {}\n", w.label, ring_elem_text(r));
    }
    for a in 0..k0.rank() {
        for b in a..k0.rank() {
            s += &format!("V{a} * V{b} = {}\n", multiset_text(&k0.structure[a][b]));
        }
    }
    if k0.is_group_ring_of_characters() {
        s += &format!("K0 = ℤ[{}]\n", unicode_group(&k0.group));
    }
    s
}

fn k0_json(d: &SkewRingDesc, k0: &K0Ring) -> Value {
    let multiset = |m: &Multiset| -> Value {
        m.iter()
            .map(|(&z, &r)| json!({"label": z, "coeff": r}))
            .collect()
    };
    let mut products = Vec::new();
    for a in 0..k0.rank() {
        for b in a..k0.rank() {
            products.push(json!({"a": a, "b": b, "product": multiset(&k0.structure[a][b])}));
        }
    }
    json!({
        "desc": desc_json(d),
        "unit": k0.unit_label(),
        "basis": k0.factors.iter().zip(&k0.rho_images).map(|(w, r)| json!({
            "label": w.label,
            "orbit": w.orbit.characters.iter().map(|c| c.0.clone()).collect::<Vec<_>>(),
            "rho": r.terms().map(|(chi, c)| json!({"chi": chi.0, "coeff": c})).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "products": products,
        "group_ring": k0.is_group_ring_of_characters(),
    })
}

fn cmd_colimit(p: u64, l: u64, imax: u32, json: bool) -> Result<Outcome, CliError> {
    let c = colimit_k0(p, l, imax)?;
    let top = c.levels.last().expect("imax > 0");
    let injective = c.transitions.iter().all(|t| t.is_injective());
    let ring_maps = c.transitions.iter().all(|t| c.is_ring_map(t));
    if json {
        let v = json!({
            "p": p,
            "l": l,
            "imax": imax,
            "levels": c.levels.iter().map(|lvl| json!({
                "i": lvl.i,
                "i_prime": lvl.i_prime,
                "rank": lvl.k0.rank(),
                "group_ring": lvl.k0.is_group_ring_of_characters(),
            })).collect::<Vec<_>>(),
            "transitions": c.transitions.iter().map(|t| json!({
                "from": t.from,
                "to": t.to,
                "map": t.map,
                "injective": t.is_injective(),
                "ring_map": c.is_ring_map(t),
            })).collect::<Vec<_>>(),
            "basis": c.basis.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
        });
        return Ok(Outcome::ok(line(&v)));
    }
    let mut s = format!("K0 colimit for p={p} l={l}, levels 1..={imax}\n");
    for lvl in &c.levels {
        s += &format!(
            "level {}: i'={} rank {}{}\n",
            lvl.i,
            lvl.i_prime,
            lvl.k0.rank(),
            if lvl.k0.is_group_ring_of_characters() {
                format!(", ℤ[{}]", unicode_group(&lvl.group))
            } else {
                String::new()
            }
        );
    }
    for t in &c.transitions {
        s += &format!(
            "transition {} -> {}: {} {}\n",
            t.from,
            t.to,
            if t.is_injective() { "injective" } else { "NOT injective" },
            if c.is_ring_map(t) { "ring map" } else { "NOT a ring map" }
        );
    }
    let basis: Vec<String> = c.basis.iter().map(|q| q.to_string()).collect();
    s += &format!("basis ({}): {}\n", basis.len(), basis.join(" "));
    if top.k0.is_group_ring_of_characters() && injective && ring_maps {
        s += &format!("truncated colimit = ℤ[{}]\n", unicode_group(&top.group));
    }
    Ok(Outcome::ok(s))
}

fn lcompl_json(g: &LComplGroup) -> Value {
    json!({"zl_rank": g.zl_rank, "torsion": g.torsion})
}

fn fg_json(g: &FgAbGroup) -> Value {
    serde_json::to_value(g).expect("serializable")
}

fn cmd_kgroups(
    p: u64,
    d: u32,
    l: Option<u64>,
    nmax: u32,
    imax: Option<u32>,
    json: bool,
) -> Result<Outcome, CliError> {
    let q = p
        .checked_pow(d)
        .ok_or_else(|| CliError::invalid("BAD_ARGUMENT", format!("{p}^{d} overflows")))?;
    if !skewk_core::ff::is_prime(p) {
        return Err(CliError::invalid("NOT_PRIME", format!("{p} is not prime")));
    }
    let mut rows = Vec::new();
    let mut text = format!("K-groups of GF({q})");
    if let Some(l) = l {
        text += &format!(", completed at l={l}");
    }
    text.push('\n');
    for n in 0..=nmax {
        let k = k_finite_field(q, n)?;
        let mut row = json!({"n": n, "k": fg_json(&k)});
        text += &format!("K_{n} = {k}");
        if let Some(l) = l {
            let c = l_complete(&k, l)?;
            let closure = k_f_completed(p, l, n)?;
            text += &format!("; completed {c}; closure {closure}");
            row["completed"] = lcompl_json(&c);
            row["closure"] = lcompl_json(&closure);
        }
        text.push('\n');
        rows.push(row);
    }
    let mut v = json!({"p": p, "d": d, "q": q, "l": l, "rows": rows});
    if let (Some(l), Some(imax)) = (l, imax) {
        let mut reps = Vec::new();
        for n in 0..=nmax {
            let r = k_rep_groups(p, l, n, imax)?;
            text += &format!(
                "K_{n}(Rep, level {imax}) = ℤ^{} ⊗ {} (approximant GF({p}^{}))\n",
                r.k0_rank, r.coefficient, r.approximant_degree
            );
            for w in &r.warnings {
                text += &format!("  warning: {w}\n");
            }
            reps.push(json!({
                "n": n,
                "k0_rank": r.k0_rank,
                "approximant_degree": r.approximant_degree,
                "coefficient": fg_json(&r.coefficient),
                "warnings": r.warnings,
            }));
        }
        v["rep"] = Value::Array(reps);
    }
    Ok(Outcome::ok(if json { line(&v) } else { text }))
}

fn stability_json(r: &StabilityReport) -> Value {
    serde_json::to_value(r).expect("serializable")
}

fn stability_text(r: &StabilityReport) -> String {
    let mut s = format!(
        "stability for p={} l={}, j <= {}, m <= {} prime to l: {}\n",
        r.p,
        r.l,
        r.j_max,
        r.m_max,
        if r.is_clean() {
            "clean".to_string()
        } else {
            format!("{} flagged", r.flagged.len())
        }
    );
    for f in &r.flagged {
        s += &format!(
            "flag j={} m={}: v_{}({}^{} - 1) = {} != v_{}({}^{} - 1) = {}\n",
            f.j,
            f.m,
            r.l,
            r.p,
            f.m * f.j,
            f.v_extended,
            r.l,
            r.p,
            f.j,
            f.v_base
        );
    }
    s
}

fn page_json(page: &E1Page) -> Value {
    json!({
        "p": page.p,
        "l": page.l,
        "q": page.q,
        "t_min": page.t_min,
        "t_max": page.t_max,
        "s_min": page.s_min,
        "s_max": page.s_max,
        "differentials_zero": page.differentials_zero,
        "entries": page.entries.iter().filter(|(_, g)| !g.is_zero()).map(|(&(s, t), g)| json!({
            "s": s,
            "t": t,
            "group": lcompl_json(g),
        })).collect::<Vec<_>>(),
    })
}

fn main_json(r: &MainReport) -> Value {
    json!({
        "p": r.p,
        "l": r.l,
        "n_max": r.n_max,
        "rows": r.rows.iter().map(|row| json!({
            "n": row.n,
            "derived_completion": lcompl_json(&row.derived_completion),
            "closure": lcompl_json(&row.closure),
            "agree": row.agree,
        })).collect::<Vec<_>>(),
        "stability": stability_json(&r.stability),
        "verdict": r.verdict.to_string(),
    })
}

fn main_text(r: &MainReport) -> String {
    let w = r
        .rows
        .iter()
        .map(|row| row.derived_completion.to_string().chars().count())
        .max()
        .unwrap_or(1)
        .max(18);
    let mut s = format!("main identity for p={} l={}, 0 <= n <= {}\n", r.p, r.l, r.n_max);
    s += &format!("{:>4}  {:<w$}  {:<w$}  agree\n", "n", "derived completion", "K(closure)");
    for row in &r.rows {
        let a = row.derived_completion.to_string();
        let b = row.closure.to_string();
        s += &format!(
            "{:>4}  {}{}  {}{}  {}\n",
            row.n,
            a,
            " ".repeat(w - a.chars().count()),
            b,
            " ".repeat(w - b.chars().count()),
            if row.agree { "yes" } else { "NO" }
        );
    }
    for f in &r.stability.flagged {
        s += &format!(
            "warning: stability fails at j={} m={} (v_{} {} -> {})\n",
            f.j, f.m, r.l, f.v_base, f.v_extended
        );
    }
    s += &format!("verdict: {}\n", r.verdict);
    s
}

fn grid_text(r: &GridReport) -> String {
    let mut s = String::new();
    for c in &r.results {
        s += &c.line();
        s.push('\n');
    }
    s += &r.summary_line();
    s.push('\n');
    s
}

/// One record per case, then the summary.
fn grid_json(r: &GridReport) -> String {
    let mut s = String::new();
    for c in &r.results {
        s += &line(&serde_json::to_value(c).expect("serializable"));
    }
    s += &line(&json!({
        "bounds": serde_json::to_value(&r.bounds).expect("serializable"),
        "summary": serde_json::to_value(&r.summary).expect("serializable"),
        "agree": r.all_agree(),
    }));
    s
}
