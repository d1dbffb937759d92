//! The `sma` command-line tool.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::diag::{simultaneous_diagonalize_in_sma, spectral_idempotents};
use crate::error::{Error, Result};
use crate::format::{
    gm_entry_line, jordan_form_report, parse_gm, parse_gw, parse_index_list, parse_lm, parse_qo,
    verdict_report, write_gm, write_gw, write_index_list, write_lm, write_qo, OutputFormat, Report,
};
use crate::jordan::{
    algebra_embeds_into, all_algebra_automorphisms_inner, classify_into_codomain, classify_jordan,
    embedding_map, extends_to_full_jordan_automorphism, jordan_embeds_into,
    multiplicativity_dichotomy, synthesize_jordan, LinearMapOnSMA,
};
use crate::quasiorder::QuasiOrder;
use crate::rankpres::{
    bounded_rank_preserver_check, certify_rank_one_preserver, classify_rank_preserver,
    is_rank_one_preserver_sampled, nontrivial_g_rank_witness, rectangle_indicator,
    sample_rank_one_in_sma, PreserverVerdict, VerdictKind,
};
use crate::selftest;
use crate::transmap::{all_transitive_trivial, random_transitive_map, TransitiveMap, TrivialityCertificate};
use crate::{GaussianRational as G, Matrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    /// 0 positive, 1 negative with certificate, 2 input error.
    pub exit_code: i32,
    pub report: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    JsonLines,
}

#[derive(Debug, Parser)]
#[command(name = "sma", version, about = "Exact decision procedures on structural matrix algebras")]
struct Cli {
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    /// Close input relations instead of rejecting non-transitive ones.
    #[arg(long, global = true)]
    close: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the reflexive-transitive closure.
    Close { qo: PathBuf },
    /// Classes, center dimension, rectangles and automorphism predicates.
    Info { qo: PathBuf },
    /// A relabelling making the relation block upper-triangular.
    Blocks { qo: PathBuf },
    /// Search for an algebra (or Jordan) embedding into a second relation.
    Embed {
        #[arg(long)]
        jordan: bool,
        qo: PathBuf,
        target: PathBuf,
    },
    /// Decide whether a transitive map is trivial.
    Trivial { qo: PathBuf, gw: PathBuf },
    /// Decide whether every transitive map on the relation is trivial.
    AllTrivial { qo: PathBuf },
    /// Simultaneously diagonalize commuting matrices inside the algebra.
    Diagonalize {
        qo: PathBuf,
        #[arg(required = true)]
        gm: Vec<PathBuf>,
    },
    /// Canonical form of a Jordan embedding.
    Classify {
        qo: PathBuf,
        lm: PathBuf,
        #[arg(long)]
        codomain: Option<PathBuf>,
        /// Also write `<prefix>.gm` and `<prefix>.gw` for `synthesize`.
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Build the map `E_ij ↦ S(P g E_ij + (I−P) g E_ji)S⁻¹`.
    Synthesize {
        qo: PathBuf,
        #[arg(long)]
        s: PathBuf,
        /// Comma-separated points of a class union, or `none`.
        #[arg(long, allow_hyphen_values = true)]
        classes: String,
        #[arg(long)]
        g: PathBuf,
    },
    /// Decide rank preservation, or sample ranks up to a bound.
    CheckRank {
        #[arg(long)]
        max_rank: Option<usize>,
        qo: PathBuf,
        lm: PathBuf,
    },
    /// Decide rank-one preservation.
    CheckRankOne { qo: PathBuf, lm: PathBuf },
    /// A matrix whose rank changes under the induced map of a nontrivial weight map.
    Witness { qo: PathBuf, gw: PathBuf },
    /// Run the randomized invariant suites.
    Selftest {
        #[arg(long, default_value_t = 6)]
        n: usize,
    },
}

struct Inputs {
    close: bool,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse {
        file: path.display().to_string(),
        line: 0,
        rule: format!("cannot read file: {e}"),
    })
}

fn name(path: &Path) -> String {
    path.display().to_string()
}

impl Inputs {
    fn relation(&self, path: &Path) -> Result<QuasiOrder> {
        parse_qo(&read(path)?, &name(path), self.close)
    }

    fn weights(&self, path: &Path, rho: &QuasiOrder) -> Result<TransitiveMap<G>> {
        parse_gw(&read(path)?, &name(path), rho)
    }

    fn map(&self, path: &Path, rho: &QuasiOrder) -> Result<LinearMapOnSMA<G>> {
        parse_lm(&read(path)?, &name(path), rho)
    }

    /// A square matrix of size `n` supported in `rho` when given.
    fn matrix(&self, path: &Path, n: usize, rho: Option<&QuasiOrder>) -> Result<Matrix> {
        let text = read(path)?;
        let m = parse_gm(&text, &name(path))?;
        if m.rows() != n || m.cols() != n {
            return Err(Error::Parse {
                file: name(path),
                line: 1,
                rule: format!("expected a {n}x{n} matrix, found {}x{}", m.rows(), m.cols()),
            });
        }
        if let Some(rho) = rho {
            if let Err(Error::SupportViolation((i, j))) = rho.check_support(&m) {
                return Err(Error::Parse {
                    file: name(path),
                    line: gm_entry_line(&text, i, j, n),
                    rule: format!("entry ({},{}) lies outside the relation", i + 1, j + 1),
                });
            }
        }
        Ok(m)
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn classes_text(blocks: &[Vec<usize>]) -> String {
    blocks
        .iter()
        .map(|b| format!("{{{}}}", write_index_list(b)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn walk_text(walk: &[crate::transmap::WalkStep]) -> String {
    walk.iter()
        .map(|s| format!("({},{}){}", s.edge.0 + 1, s.edge.1 + 1, if s.forward { "+" } else { "-" }))
        .collect::<Vec<_>>()
        .join(" ")
}

fn values_text(values: &[G]) -> String {
    values.iter().map(G::to_string).collect::<Vec<_>>().join(" ")
}

fn verdict_outcome(v: &PreserverVerdict<G>, positive: VerdictKind) -> (i32, Report) {
    (if v.kind == positive { 0 } else { 1 }, verdict_report(v))
}

fn execute(cli: &Cli) -> Result<(i32, Report)> {
    let io = Inputs { close: cli.close };
    let mut r = Report::new();
    let code = match &cli.command {
        Command::Close { qo } => {
            let rho = parse_qo(&read(qo)?, &name(qo), true)?;
            r.raw("RELATION", write_qo(&rho));
            0
        }
        Command::Info { qo } => {
            let rho = io.relation(qo)?;
            let components = rho.approx_classes();
            r.field("N", rho.n())
                .field("PAIRS", rho.len())
                .field("CLASSES", classes_text(&rho.two_sided_classes().blocks))
                .field("COMPONENTS", classes_text(&components.blocks))
                .field("CENTER-DIMENSION", components.len())
                .field("RECTANGLES", rho.rectangles().len())
                .field("ALL-TRIVIAL", yes_no(all_transitive_trivial(&rho)))
                .field("DICHOTOMY", yes_no(multiplicativity_dichotomy(&rho)))
                .field("INNER", yes_no(all_algebra_automorphisms_inner(&rho)))
                .field("EXTENDS", yes_no(extends_to_full_jordan_automorphism(&rho)));
            0
        }
        Command::Blocks { qo } => {
            let rho = io.relation(qo)?;
            let bt = rho.block_triangular_form();
            let sizes: Vec<String> = bt.sizes.iter().map(usize::to_string).collect();
            r.field("PERM", write_index_list(&bt.perm))
                .field("SIZES", sizes.join(" "))
                .block("RELATION", write_qo(&rho.permuted(&bt.perm)));
            0
        }
        Command::Embed { jordan, qo, target } => {
            let rho = io.relation(qo)?;
            let dst = io.relation(target)?;
            let found = if *jordan {
                jordan_embeds_into(&rho, &dst)
            } else {
                algebra_embeds_into(&rho, &dst).map(|p| ((0..rho.n()).collect(), p))
            };
            match found {
                Some((u, perm)) => {
                    let phi: LinearMapOnSMA<G> = embedding_map(&rho, &u, &perm)?;
                    phi.check_images_in(&dst)?;
                    let ok = if *jordan { phi.is_jordan_homomorphism() } else { phi.is_multiplicative() };
                    if !ok || phi.image_rank() != rho.len() {
                        return Err(Error::InternalInconsistency("embedding certificate fails".into()));
                    }
                    r.field("VERDICT", "embeds")
                        .field("CLASSES", write_index_list(&u))
                        .field("PERM", write_index_list(&perm));
                    0
                }
                None => {
                    r.field("VERDICT", "none").field(
                        "REASON",
                        "no increasing permutation exists for any admissible class union",
                    );
                    1
                }
            }
        }
        Command::Trivial { qo, gw } => {
            let rho = io.relation(qo)?;
            let g = io.weights(gw, &rho)?;
            match g.triviality_witness() {
                TrivialityCertificate::Separator(s) => {
                    if TransitiveMap::from_separator(rho, &s)? != g {
                        return Err(Error::InternalInconsistency("separator does not reproduce g".into()));
                    }
                    r.field("VERDICT", "trivial").field("SEPARATOR", values_text(&s));
                    0
                }
                TrivialityCertificate::Violation { walk, product } => {
                    r.field("VERDICT", "nontrivial")
                        .field("WALK", walk_text(&walk))
                        .field("PRODUCT", product);
                    1
                }
            }
        }
        Command::AllTrivial { qo } => {
            let rho = io.relation(qo)?;
            if all_transitive_trivial(&rho) {
                r.field("VERDICT", "true");
                0
            } else {
                r.field("VERDICT", "false");
                let example = (0..256u64)
                    .map(|k| random_transitive_map::<G>(&rho, cli.seed.wrapping_add(k)))
                    .find(|g| !g.is_trivial());
                if let Some(g) = example {
                    if let TrivialityCertificate::Violation { walk, product } = g.triviality_witness() {
                        r.block("G", write_gw(&g))
                            .field("WALK", walk_text(&walk))
                            .field("PRODUCT", product);
                    }
                }
                1
            }
        }
        Command::Diagonalize { qo, gm } => {
            let rho = io.relation(qo)?;
            let family: Vec<Matrix> = gm
                .iter()
                .map(|p| io.matrix(p, rho.n(), Some(&rho)))
                .collect::<Result<_>>()?;
            match simultaneous_diagonalize_in_sma(&rho, &family) {
                Ok(s) => {
                    let s_inv = s.inverse()?;
                    r.field("VERDICT", "diagonalizable").block("S", write_gm(&s));
                    for (path, f) in gm.iter().zip(&family) {
                        let d = &(&s_inv * f) * &s;
                        r.field("DIAGONAL", format!("{} {}", name(path), values_text(&d.diagonal())));
                    }
                    0
                }
                Err(e @ (Error::NotDiagonalizable | Error::IrrationalSpectrum | Error::PreconditionViolated(_))) => {
                    r.field("VERDICT", "not-diagonalizable").field("REASON", &e);
                    for (path, f) in gm.iter().zip(&family) {
                        if let Err(own) = spectral_idempotents(f) {
                            r.field("MATRIX", format!("{}: {own}", name(path)));
                        }
                    }
                    1
                }
                Err(e) => return Err(e),
            }
        }
        Command::Classify { qo, lm, codomain, write } => {
            let rho = io.relation(qo)?;
            let phi = io.map(lm, &rho)?;
            let target = codomain.as_deref().map(|p| io.relation(p)).transpose()?;
            if let Some(t) = &target {
                if let Err(Error::SupportViolation((i, j))) = phi.check_images_in(t) {
                    r.field("VERDICT", "outside-codomain")
                        .field("ENTRY", format!("({},{})", i + 1, j + 1));
                    return Ok((1, r));
                }
            }
            let result = match &target {
                Some(t) => classify_into_codomain(&phi, t),
                None => classify_jordan(&phi),
            };
            match result {
                Ok(form) => {
                    if let Some(prefix) = write {
                        let out = |ext: &str, body: String| {
                            let path = prefix.with_extension(ext);
                            std::fs::write(&path, body).map_err(|e| Error::Parse {
                                file: name(&path),
                                line: 0,
                                rule: format!("cannot write file: {e}"),
                            })
                        };
                        out("gm", write_gm(&form.s))?;
                        out("gw", write_gw(&form.g))?;
                    }
                    r.field("VERDICT", "jordan").extend(jordan_form_report(&form));
                    0
                }
                Err(Error::NotJordan(((a, b), (c, d)))) => {
                    r.field("VERDICT", "not-jordan")
                        .field("UNITS", format!("({},{}) ({},{})", a + 1, b + 1, c + 1, d + 1));
                    1
                }
                Err(Error::VanishingUnitImage((i, j))) => {
                    r.field("VERDICT", "vanishing-unit").field("UNIT", format!("({},{})", i + 1, j + 1));
                    1
                }
                Err(e) => return Err(e),
            }
        }
        Command::Synthesize { qo, s, classes, g } => {
            let rho = io.relation(qo)?;
            let s = io.matrix(s, rho.n(), None)?;
            let u = parse_index_list(classes, rho.n())?;
            if let Err(e) = rho.class_union_mask(&u) {
                return Err(Error::Parse {
                    file: "--classes".into(),
                    line: 1,
                    rule: e.to_string(),
                });
            }
            let g = io.weights(g, &rho)?;
            let phi = synthesize_jordan(&rho, &s, &u, &g)?;
            r.raw("MAP", write_lm(&phi));
            0
        }
        Command::CheckRank { max_rank, qo, lm } => {
            let rho = io.relation(qo)?;
            let phi = io.map(lm, &rho)?;
            match max_rank {
                Some(k) => match bounded_rank_preserver_check(&phi, *k, cli.seed)? {
                    None => {
                        r.field("VERDICT", "preserves-sampled-ranks").field("MAX-RANK", k);
                        0
                    }
                    Some(c) => {
                        r.field("VERDICT", "Neither")
                            .field("REASON", &c.reason)
                            .block("WITNESS", write_gm(&c.matrix))
                            .field("RANK", c.rank)
                            .field("IMAGE-RANK", c.image_rank);
                        1
                    }
                },
                None => {
                    let (code, report) = verdict_outcome(&classify_rank_preserver(&phi)?, VerdictKind::RankPreserver);
                    r.extend(report);
                    code
                }
            }
        }
        Command::CheckRankOne { qo, lm } => {
            let rho = io.relation(qo)?;
            let phi = io.map(lm, &rho)?;
            match certify_rank_one_preserver(&phi) {
                Ok(v) => {
                    let (code, report) = verdict_outcome(&v, VerdictKind::RankOnePreserver);
                    r.extend(report);
                    code
                }
                Err(Error::NotUnital) => {
                    // Neither route certifies; fall back on probes and samples.
                    let probes: Vec<Matrix> = rho
                        .rectangles()
                        .iter()
                        .map(|rect| rectangle_indicator(rho.n(), rect))
                        .chain(sample_rank_one_in_sma(&rho, 1000, cli.seed))
                        .collect();
                    match is_rank_one_preserver_sampled(&phi, &probes)? {
                        Some(c) => {
                            r.field("VERDICT", "Neither")
                                .field("REASON", &c.reason)
                                .block("WITNESS", write_gm(&c.matrix))
                                .field("RANK", c.rank)
                                .field("IMAGE-RANK", c.image_rank);
                            1
                        }
                        None => {
                            r.field("VERDICT", "RankOnePreserver")
                                .field("FORM", "sampled")
                                .field("SAMPLES", probes.len())
                                .field("REASON", "map is neither unital nor Jordan; verdict rests on samples");
                            0
                        }
                    }
                }
                Err(Error::VanishingUnitImage((i, j))) => {
                    r.field("VERDICT", "Neither")
                        .field("REASON", "a unit maps to zero")
                        .block("WITNESS", write_gm(&Matrix::unit(rho.n(), i, j)))
                        .field("RANK", 1)
                        .field("IMAGE-RANK", 0);
                    1
                }
                Err(e) => return Err(e),
            }
        }
        Command::Witness { qo, gw } => {
            let rho = io.relation(qo)?;
            let g = io.weights(gw, &rho)?;
            match nontrivial_g_rank_witness(&g) {
                Ok(a) => {
                    let image_rank = g.apply_induced(&a)?.rank();
                    r.field("VERDICT", "Neither")
                        .field("REASON", "the induced map of a nontrivial transitive map changes rank")
                        .block("WITNESS", write_gm(&a))
                        .field("RANK", a.rank())
                        .field("IMAGE-RANK", image_rank);
                    1
                }
                Err(Error::GIsTrivial) => {
                    let TrivialityCertificate::Separator(s) = g.triviality_witness() else {
                        return Err(Error::InternalInconsistency("trivial map without separator".into()));
                    };
                    r.field("VERDICT", "RankPreserver").field("SEPARATOR", values_text(&s));
                    0
                }
                Err(e) => return Err(e),
            }
        }
        Command::Selftest { n } => {
            let outcomes = selftest::run_all(cli.seed, *n);
            for o in &outcomes {
                r.field(
                    "SUITE",
                    format!(
                        "{} cases={} failures={} {}",
                        o.name,
                        o.cases,
                        o.failures,
                        if o.passed() { "PASS" } else { "FAIL" }
                    ),
                );
                if let Some(f) = &o.first_failure {
                    r.field("FIRST-FAILURE", format!("{}: {f}", o.name));
                }
            }
            if outcomes.iter().all(|o| o.passed()) {
                0
            } else {
                1
            }
        }
    };
    Ok((code, r))
}

/// Parses `argv` (program name first) and runs one command.
pub fn run<I, T>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let exit_code = if e.use_stderr() { 2 } else { 0 };
            return CommandOutcome {
                exit_code,
                report: e.to_string(),
            };
        }
    };
    let format = match cli.format {
        Format::Text => OutputFormat::Text,
        Format::JsonLines => OutputFormat::JsonLines,
    };
    match execute(&cli) {
        Ok((exit_code, report)) => CommandOutcome {
            exit_code,
            report: report.render(format),
        },
        Err(e) => {
            let mut r = Report::new();
            r.field("ERROR", e);
            CommandOutcome {
                exit_code: 2,
                report: r.render(format),
            }
        }
    }
}
