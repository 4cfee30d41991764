use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lexsg::casegen::{gen_avoid, gen_dice, gen_hallway, gen_random, DiceSpec, FuzzSpec, GenError, GridSpec};
use lexsg::numeric::{as_f64, parse_rational};
use lexsg::oracle::{brute_force_lex, OracleLimits};
use lexsg::solve_lex::{export_strategy, lex_ge_tol, parse_strategy, SolveReport};
use lexsg::{
    decide, evaluate_strategy, parse_game, serialize_model, solve_lex, LexObjective, Mode, Numeric, Rational,
    SolveError, SolverConfig, StateId, StochasticGame,
};

/// Default seed of the random game generator when neither `--seed` nor
/// `LEXSG_SEED` is given.
const DEFAULT_FUZZ_SEED: u64 = 1;
/// Per-component tolerance of `check` in VI mode.
const CHECK_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "lexsg", version, about = "Stochastic games with lexicographic reachability and safety objectives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute lex-values and an optimal strategy.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Write the strategy (with values) to this file.
        #[arg(long)]
        strategy_out: Option<PathBuf>,
    },
    /// Decide whether the lex-value at a state is at least a threshold.
    Decide {
        #[command(flatten)]
        common: Common,
        /// Comma-separated vector of rationals or decimals, e.g. `1/2,0.25`.
        #[arg(long)]
        threshold: String,
    },
    /// Evaluate a strategy file and compare with the values it claims.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Generate a model file.
    Gen(GenArgs),
    /// Compare the solver with exhaustive strategy enumeration.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = OracleLimits::default().max_pairs)]
        max_pairs: u64,
        #[arg(long, default_value_t = OracleLimits::default().max_product_states)]
        max_product_states: usize,
    },
}

#[derive(Args)]
struct Common {
    /// Model file in the .sg format.
    input: PathBuf,
    /// Solver engine; `solve`, `decide` and `check` default to vi, `oracle` to exact.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Value iteration stopping threshold.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Tolerance for treating actions as equally good in VI mode.
    #[arg(long)]
    action_epsilon: Option<f64>,
    /// Restrict output to this state; for `decide` it overrides the model's `init` line.
    #[arg(long)]
    state: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Vi,
    Exact,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Lines,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Hallway,
    Avoid,
    Dice,
    Random,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    width: usize,
    #[arg(long, default_value_t = 5)]
    height: usize,
    #[arg(long, default_value = "1/10")]
    slip: String,
    #[arg(long, default_value = "1/100")]
    damage: String,
    #[arg(long, default_value = "1/10")]
    search: String,
    /// Seed for random and avoid games; falls back to `LEXSG_SEED`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 6)]
    states: usize,
    #[arg(long, default_value_t = 2)]
    actions: usize,
    #[arg(long, default_value_t = 3)]
    branching: usize,
    #[arg(long, default_value_t = 2)]
    objectives: usize,
    #[arg(long, default_value_t = 3)]
    rounds: usize,
    #[arg(long, default_value_t = 6)]
    faces: usize,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }

    fn input(msg: impl Into<String>) -> Self {
        Failure { code: 3, msg: msg.into() }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::Config(_) => 2,
            SolveError::IterationLimit(_) | SolveError::LimitExceeded(_) => 4,
            SolveError::Singular => 1,
            _ => 3,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        Failure::usage(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        // A failed check is a verdict, not an error: its report goes to stdout.
        Err(f) if f.code == 1 && f.msg.ends_with("FAIL\n") => {
            print!("{}", f.msg);
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Solve { common, strategy_out } => {
            let ctx = Context::load(&common, Mode::Vi)?;
            match ctx.cfg.mode {
                Mode::Exact => cmd_solve::<Rational>(&ctx, strategy_out.as_deref()),
                Mode::Vi => cmd_solve::<f64>(&ctx, strategy_out.as_deref()),
            }
        }
        Command::Decide { common, threshold } => {
            let ctx = Context::load(&common, Mode::Vi)?;
            let threshold = parse_threshold(&threshold)?;
            match ctx.cfg.mode {
                Mode::Exact => cmd_decide::<Rational>(&ctx, &threshold),
                Mode::Vi => cmd_decide::<f64>(&ctx, &threshold),
            }
        }
        Command::Check { common, strategy } => {
            let ctx = Context::load(&common, Mode::Vi)?;
            let text = read(&strategy)?;
            match ctx.cfg.mode {
                Mode::Exact => cmd_check::<Rational>(&ctx, &text),
                Mode::Vi => cmd_check::<f64>(&ctx, &text),
            }
        }
        Command::Gen(args) => cmd_gen(&args),
        Command::Oracle { common, max_pairs, max_product_states } => {
            let ctx = Context::load(&common, Mode::Exact)?;
            let limits = OracleLimits { max_pairs, max_product_states };
            match ctx.cfg.mode {
                Mode::Exact => cmd_oracle::<Rational>(&ctx, &limits),
                Mode::Vi => cmd_oracle::<f64>(&ctx, &limits),
            }
        }
    }
}

/// A parsed model plus the settings shared by every solving command.
struct Context {
    game: StochasticGame,
    obj: LexObjective,
    cfg: SolverConfig,
    state: Option<StateId>,
    format: Format,
}

impl Context {
    fn load(common: &Common, default_mode: Mode) -> Result<Self, Failure> {
        let mode = match common.mode {
            Some(ModeArg::Vi) => Mode::Vi,
            Some(ModeArg::Exact) => Mode::Exact,
            None => default_mode,
        };
        let mut cfg = match mode {
            Mode::Vi => SolverConfig::vi(),
            Mode::Exact => SolverConfig::exact(),
        };
        if let Some(e) = common.epsilon {
            cfg.vi_epsilon = e;
        }
        if let Some(e) = common.action_epsilon {
            cfg.action_epsilon = e;
        }
        cfg.validate()?;
        let text = read(&common.input)?;
        let model = parse_game(&text).map_err(|e| Failure::input(format!("{}: {e}", common.input.display())))?;
        let obj =
            model.objective.ok_or_else(|| Failure::input(format!("{}: no `obj` lines", common.input.display())))?;
        let game = model.game;
        let state = match &common.state {
            Some(name) => {
                Some(game.state_index(name).ok_or_else(|| Failure::input(format!("unknown state `{name}`")))?)
            }
            None => None,
        };
        Ok(Context { game, obj, cfg, state, format: common.format })
    }

    /// States to report: the selected one, or all.
    fn shown(&self) -> Vec<StateId> {
        match self.state {
            Some(s) => vec![s],
            None => (0..self.game.num_states()).collect(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parse_threshold(text: &str) -> Result<Vec<Rational>, Failure> {
    text.split(',')
        .map(|part| parse_rational(part).ok_or_else(|| Failure::input(format!("bad threshold component `{part}`"))))
        .collect()
}

fn render_vec<N: Numeric>(v: &[N]) -> String {
    let parts: Vec<String> = v.iter().map(N::render).collect();
    format!("({})", parts.join(", "))
}

fn value_lines<N: Numeric>(out: &mut String, game: &StochasticGame, states: &[StateId], values: &[Vec<N>]) {
    for &s in states {
        let _ = write!(out, "value {}", game.name(s));
        for x in &values[s] {
            let _ = write!(out, " {}", x.render());
        }
        out.push('\n');
    }
}

fn cmd_solve<N: Numeric>(ctx: &Context, strategy_out: Option<&Path>) -> Outcome {
    let start = Instant::now();
    let rep: SolveReport<N> = solve_lex(&ctx.game, &ctx.obj, &ctx.cfg)?;
    let elapsed = start.elapsed();
    if let Some(path) = strategy_out {
        let text = export_strategy(&ctx.game, &rep.strategy, Some(&rep.values));
        std::fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    }
    let stats = &rep.stats;
    let mut out = String::new();
    match ctx.format {
        Format::Text => {
            for s in ctx.shown() {
                let _ = writeln!(out, "{}: {}", ctx.game.name(s), render_vec(rep.values.get(s)));
            }
            let _ = writeln!(out, "stages {}/{}", stats.stages_explored, stats.stage_bound);
            let _ = writeln!(out, "avg actions: original {:.3}", stats.original_avg_actions);
            for (key, avgs) in &stats.stage_avg_actions {
                let parts: Vec<String> = avgs.iter().map(|a| format!("{a:.3}")).collect();
                let _ = writeln!(out, "avg actions: stage {} after each objective {}", key.render(), parts.join(" "));
            }
            let _ = writeln!(out, "solver calls {} ({} qro)", stats.solver_calls(), stats.qro_calls);
            let _ = writeln!(out, "time {:.3} ms", elapsed.as_secs_f64() * 1e3);
        }
        Format::Lines => {
            value_lines(&mut out, &ctx.game, &ctx.shown(), &rep.values.values);
            let _ = writeln!(out, "stages {} {}", stats.stages_explored, stats.stage_bound);
        }
    }
    Ok(out)
}

fn cmd_decide<N: Numeric>(ctx: &Context, threshold: &[Rational]) -> Outcome {
    let s0 =
        ctx.state.or(ctx.game.initial()).ok_or_else(|| Failure::usage("decide needs --state or an `init` line"))?;
    let yes = decide::<N>(&ctx.game, &ctx.obj, s0, threshold, &ctx.cfg)?;
    Ok(format!("{yes}\n"))
}

fn cmd_check<N: Numeric>(ctx: &Context, text: &str) -> Outcome {
    let file = parse_strategy(&ctx.game, &ctx.obj, text)?;
    let achieved = evaluate_strategy::<N>(&ctx.game, &ctx.obj, &file.strategy, &ctx.cfg)?;
    if file.claimed.is_empty() {
        return Err(Failure::input("strategy file has no `value` lines"));
    }
    let tol = match N::MODE {
        Mode::Exact => 0.0,
        Mode::Vi => CHECK_TOL,
    };
    let mut out = String::new();
    let mut all_ok = true;
    for s in ctx.shown().into_iter().filter(|s| file.claimed.contains_key(s)) {
        let claim: Vec<N> = file.claimed[&s].iter().map(N::from_rational).collect();
        let got = achieved.get(s);
        let ok = lex_ge_tol(got, &claim, tol);
        all_ok &= ok;
        match ctx.format {
            Format::Text => {
                let verdict = if ok { "ok" } else { "BELOW" };
                let _ = writeln!(
                    out,
                    "{}: achieved {} claimed {} {verdict}",
                    ctx.game.name(s),
                    render_vec(got),
                    render_vec(&claim)
                );
            }
            Format::Lines => value_lines(&mut out, &ctx.game, &[s], &achieved.values),
        }
    }
    if all_ok {
        out.push_str("PASS\n");
        Ok(out)
    } else {
        out.push_str("FAIL\n");
        Err(Failure { code: 1, msg: out })
    }
}

fn cmd_oracle<N: Numeric>(ctx: &Context, limits: &OracleLimits) -> Outcome {
    let truth = brute_force_lex(&ctx.game, &ctx.obj, limits)?;
    let rep: SolveReport<N> = solve_lex(&ctx.game, &ctx.obj, &ctx.cfg)?;
    let zero = Rational::from_integer(0.into());
    let mut worst = zero.clone();
    let mut out = String::new();
    for s in ctx.shown() {
        let mine = rep.values.get(s);
        for (a, b) in truth.get(s).iter().zip(mine) {
            let d = a - b.to_rational();
            let d = if d < zero { -d } else { d };
            if d > worst {
                worst = d;
            }
        }
        match ctx.format {
            Format::Text => {
                let _ = writeln!(
                    out,
                    "{}: oracle {} solver {}",
                    ctx.game.name(s),
                    render_vec(truth.get(s)),
                    render_vec(mine)
                );
            }
            Format::Lines => {
                let _ = write!(out, "oracle {}", ctx.game.name(s));
                for x in truth.get(s) {
                    let _ = write!(out, " {}", x.render());
                }
                out.push('\n');
                value_lines(&mut out, &ctx.game, &[s], &rep.values.values);
            }
        }
    }
    let shown = match N::MODE {
        Mode::Exact => worst.render(),
        Mode::Vi => as_f64(&worst).render(),
    };
    let _ = writeln!(out, "discrepancy {shown}");
    Ok(out)
}

fn parse_prob(name: &str, text: &str) -> Result<Rational, Failure> {
    parse_rational(text).ok_or_else(|| Failure::usage(format!("bad --{name} value `{text}`")))
}

fn seed(args: &GenArgs) -> Result<u64, Failure> {
    if let Some(s) = args.seed {
        return Ok(s);
    }
    match std::env::var("LEXSG_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::usage(format!("LEXSG_SEED is not an integer: `{v}`"))),
        Err(_) => Ok(DEFAULT_FUZZ_SEED),
    }
}

fn cmd_gen(args: &GenArgs) -> Outcome {
    let grid = || -> Result<GridSpec, Failure> {
        Ok(GridSpec {
            width: args.width,
            height: args.height,
            slip: parse_prob("slip", &args.slip)?,
            damage: parse_prob("damage", &args.damage)?,
            search: parse_prob("search", &args.search)?,
            seed: seed(args)?,
        })
    };
    let (game, obj) = match args.kind {
        Kind::Hallway => gen_hallway(&grid()?)?,
        Kind::Avoid => gen_avoid(&grid()?)?,
        Kind::Dice => gen_dice(&DiceSpec { rounds: args.rounds, faces: args.faces })?,
        Kind::Random => gen_random(&FuzzSpec {
            num_states: args.states,
            max_actions: args.actions,
            max_branching: args.branching,
            num_objectives: args.objectives,
            seed: seed(args)?,
        })?,
    };
    let text = serialize_model(&game, Some(&obj));
    match &args.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            Ok(format!("wrote {} ({} states)\n", path.display(), game.num_states()))
        }
        None => Ok(text),
    }
}
