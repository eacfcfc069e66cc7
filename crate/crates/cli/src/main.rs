//! `linkc`: check, compile, link, run and compare components written in
//! λ, λ^ref, their linking-types extensions and the target language.

mod sidecar;

use std::fmt::Display;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use linkc_core::equiv::{builtin_suite, load_suite, probe, Candidate, EquivVerdict};
use linkc_core::linker::{
    check_compat, check_component, compile_checked, link, CompatVerdict, Diagnostic,
    DiagnosticKind, Interface, LinkError, LinkManifest, TranslationChain,
};
use linkc_core::registry::{kappa_table, Registry};
use linkc_core::syntax::{parse_link_type, print, BaseLang, ExtensionId, LanguageId, Pos};
use linkc_core::target::eval_target;
use linkc_core::{Outcome, Store, DEFAULT_FUEL};

use sidecar::{parse_interface, Sidecar};

const OK: u8 = 0;
const TYPE_ERROR: u8 = 1;
const LINK_ERROR: u8 = 2;
const OUT_OF_FUEL: u8 = 3;
const USAGE: u8 = 4;

#[derive(Parser)]
#[command(name = "linkc", version, about = "Linking-types toolchain")]
struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Show how types are translated when explaining incompatibilities.
    #[arg(long, global = true)]
    explain: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FileArgs {
    file: PathBuf,
    /// Language tag (stlc, lref, stlck, lrefk, tgt); defaults to the file extension.
    #[arg(long)]
    lang: Option<String>,
    /// Linking-types extension for stlck/lrefk.
    #[arg(long)]
    ext: Option<ExtensionId>,
    /// Definition to export; defaults to the last one.
    #[arg(long)]
    export: Option<String>,
    /// Linking type to check the export against.
    #[arg(long)]
    annotation: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Typecheck a component.
    Check(FileArgs),
    /// Compile a component to the target language.
    Compile {
        #[command(flatten)]
        file: FileArgs,
        /// Write the target program here, and its interface next to it as JSON.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Decide whether a provider can be passed to a client.
    Compat {
        /// Client component, interface sidecar, or inline type with --client-lang.
        client: String,
        /// Provider component, interface sidecar, or inline type with --provider-lang.
        provider: String,
        #[arg(long)]
        client_lang: Option<String>,
        #[arg(long)]
        provider_lang: Option<String>,
    },
    /// Link the components of a manifest into one target program.
    Link { manifest: PathBuf },
    /// Link and run a manifest.
    Run {
        manifest: PathBuf,
        #[arg(long, env = "LINKC_FUEL", default_value_t = DEFAULT_FUEL)]
        fuel: u64,
    },
    /// Try to tell two programs apart with a suite of contexts.
    Equiv {
        e1: PathBuf,
        e2: PathBuf,
        /// Linking type, in λ^{ref,κ} syntax, to compare at.
        #[arg(long)]
        at: String,
        /// `builtin`, or a directory of `.lrefk` context files.
        #[arg(long, default_value = "builtin")]
        suite: String,
        #[arg(long, env = "LINKC_FUEL", default_value_t = DEFAULT_FUEL)]
        fuel: u64,
    },
    /// Inspect the registered linking-types extensions.
    Extensions {
        #[command(subcommand)]
        action: ExtensionsAction,
    },
}

#[derive(Subcommand)]
enum ExtensionsAction {
    /// List extensions and their κ tables.
    List,
}

/// Writes one line, ignoring a closed reader.
fn emit(mut w: impl Write, line: impl Display) {
    let _ = writeln!(w, "{line}");
}

struct Out {
    json: bool,
    explain: bool,
}

impl Out {
    fn ok(&self, human: impl Display, value: Value) {
        if self.json {
            emit(io::stdout(), value);
        } else {
            emit(io::stdout(), human);
        }
    }

    fn fail(&self, human: impl Display, value: Value) {
        if self.json {
            emit(io::stdout(), value);
        } else {
            emit(io::stderr(), human);
        }
    }

    fn diagnostic(&self, d: &Diagnostic) -> u8 {
        self.fail(
            format!("{}:{}: error: {}", d.origin, d.pos, d.kind),
            json!({
                "status": "error",
                "file": d.origin,
                "line": d.pos.line,
                "col": d.pos.col,
                "message": d.kind.to_string(),
            }),
        );
        match d.kind {
            DiagnosticKind::Io(_) => USAGE,
            _ => TYPE_ERROR,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    let out = Out {
        json: cli.json,
        explain: cli.explain,
    };
    match dispatch(cli.command, &out) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            out.fail(
                format!("linkc: error: {e:#}"),
                json!({"status": "usage", "message": format!("{e:#}")}),
            );
            ExitCode::from(USAGE)
        }
    }
}

fn dispatch(command: Command, out: &Out) -> Result<u8> {
    match command {
        Command::Check(args) => check(&args, out),
        Command::Compile { file, emit } => compile(&file, emit.as_deref(), out),
        Command::Compat {
            client,
            provider,
            client_lang,
            provider_lang,
        } => compat(
            &client,
            client_lang.as_deref(),
            &provider,
            provider_lang.as_deref(),
            out,
        ),
        Command::Link { manifest } => link_cmd(&manifest, out),
        Command::Run { manifest, fuel } => run_cmd(&manifest, fuel, out),
        Command::Equiv {
            e1,
            e2,
            at,
            suite,
            fuel,
        } => equiv(&e1, &e2, &at, &suite, fuel, out),
        Command::Extensions {
            action: ExtensionsAction::List,
        } => extensions(out),
    }
}

fn language_of(path: &Path, lang: Option<&str>, ext: Option<ExtensionId>) -> Result<LanguageId> {
    if let Some(tag) = lang {
        return LanguageId::from_tag(tag, ext).map_err(anyhow::Error::msg);
    }
    let from_file = path
        .extension()
        .and_then(|e| e.to_str())
        .and_then(LanguageId::from_file_extension)
        .ok_or_else(|| {
            anyhow!(
                "cannot tell the language of {}; pass --lang",
                path.display()
            )
        })?;
    match (from_file.base(), from_file.extension(), ext) {
        (_, _, None) => Ok(from_file),
        (Some(base), Some(_), Some(ext)) => Ok(LanguageId::extended(base, ext)),
        _ => bail!("{from_file} takes no linking-types extension"),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn check(args: &FileArgs, out: &Out) -> Result<u8> {
    let lang = language_of(&args.file, args.lang.as_deref(), args.ext)?;
    let text = read(&args.file)?;
    let origin = args.file.display().to_string();
    match check_component(
        &origin,
        &text,
        lang,
        args.export.as_deref(),
        args.annotation.as_deref(),
    ) {
        Ok(checked) => {
            out.ok(
                format!("{origin}: {}", checked.type_string()),
                json!({"status": "ok", "file": origin, "language": lang.to_string(), "type": checked.type_string()}),
            );
            Ok(OK)
        }
        Err(d) => Ok(out.diagnostic(&d)),
    }
}

fn compile(args: &FileArgs, emit: Option<&Path>, out: &Out) -> Result<u8> {
    let lang = language_of(&args.file, args.lang.as_deref(), args.ext)?;
    let text = read(&args.file)?;
    let origin = args.file.display().to_string();
    let name = match &args.export {
        Some(n) => n.clone(),
        None => args
            .file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
    };
    let compiled = check_component(
        &origin,
        &text,
        lang,
        args.export.as_deref(),
        args.annotation.as_deref(),
    )
    .and_then(|c| compile_checked(&origin, &name, c));
    let component = match compiled {
        Ok(c) => c,
        Err(d) => return Ok(out.diagnostic(&d)),
    };
    let code = print(&component.code);
    let sidecar = Sidecar::new(&name, &component.interface());
    match emit {
        Some(path) => {
            let side_path = path.with_extension("json");
            std::fs::write(path, format!("{code}\n")).with_context(|| format!("cannot write {}", path.display()))?;
            std::fs::write(&side_path, serde_json::to_string_pretty(&sidecar)?)
                .with_context(|| format!("cannot write {}", side_path.display()))?;
            out.ok(
                format!("wrote {} and {} ({})", path.display(), side_path.display(), component.comp),
                json!({"status": "ok", "code": path, "interface": side_path, "type": component.comp.to_string()}),
            );
        }
        None => out.ok(
            &code,
            json!({"status": "ok", "code": code, "type": component.comp.to_string(), "interface": sidecar}),
        ),
    }
    Ok(OK)
}

/// Where an interface came from, for messages.
struct Loaded {
    origin: String,
    interface: Interface,
}

enum Load {
    Ok(Loaded),
    Failed(u8),
}

/// A client applied to a provider expects its parameter type; inline types
/// are taken as written.
fn load_interface(arg: &str, lang: Option<&str>, as_client: bool, out: &Out) -> Result<Load> {
    let path = Path::new(arg);
    if !path.exists() {
        let Some(tag) = lang else {
            bail!("{arg} is not a file; pass a language to read it as an inline type");
        };
        let lang = LanguageId::from_tag(tag, None).map_err(anyhow::Error::msg)?;
        return Ok(Load::Ok(Loaded {
            origin: "<inline>".into(),
            interface: parse_interface(arg, lang)?,
        }));
    }
    let origin = path.display().to_string();
    let interface = if path.extension().is_some_and(|e| e == "json") {
        let s: Sidecar = serde_json::from_str(&read(path)?)
            .with_context(|| format!("{origin} is not an interface"))?;
        s.interface()?
    } else {
        let lang = language_of(path, lang, None)?;
        match check_component(&origin, &read(path)?, lang, None, None) {
            Ok(c) => c.interface(),
            Err(d) => return Ok(Load::Failed(out.diagnostic(&d))),
        }
    };
    if !as_client {
        return Ok(Load::Ok(Loaded { origin, interface }));
    }
    match interface.param() {
        Some(param) => Ok(Load::Ok(Loaded {
            origin,
            interface: param,
        })),
        None => {
            let d = Diagnostic {
                origin,
                pos: Pos { line: 1, col: 1 },
                kind: DiagnosticKind::Parse(format!(
                    "a function to link against, found {interface}"
                )),
            };
            Ok(Load::Failed(out.diagnostic(&d)))
        }
    }
}

fn chain_lines(client: &TranslationChain, provider: &TranslationChain) -> String {
    format!("  client:   {client}\n  provider: {provider}")
}

fn compat(
    client: &str,
    client_lang: Option<&str>,
    provider: &str,
    provider_lang: Option<&str>,
    out: &Out,
) -> Result<u8> {
    let c = match load_interface(client, client_lang, true, out)? {
        Load::Ok(l) => l,
        Load::Failed(code) => return Ok(code),
    };
    let p = match load_interface(provider, provider_lang, false, out)? {
        Load::Ok(l) => l,
        Load::Failed(code) => return Ok(code),
    };
    let verdict = check_compat(&c.interface, &p.interface);
    let mut value = verdict.to_json();
    value["client_type"] = json!(c.interface.source_view());
    value["provider_type"] = json!(p.interface.source_view());
    match &verdict {
        CompatVerdict::Compatible { shared, .. } => {
            out.ok(format!("compatible at {shared}"), value);
            Ok(OK)
        }
        CompatVerdict::Incompatible {
            client: cc,
            provider: pc,
            mismatch,
        } => {
            let mut msg = format!(
                "{}:1:1: error: {} is not compatible with {} from {}",
                c.origin,
                c.interface.source_view(),
                p.interface.source_view(),
                p.origin
            );
            explain(&mut msg, cc, pc, mismatch.as_ref(), out.explain);
            out.fail(msg, value);
            Ok(TYPE_ERROR)
        }
    }
}

fn explain(
    msg: &mut String,
    client: &TranslationChain,
    provider: &TranslationChain,
    mismatch: Option<&(
        linkc_core::syntax::TargetType,
        linkc_core::syntax::TargetType,
    )>,
    full: bool,
) {
    if full {
        msg.push('\n');
        msg.push_str(&chain_lines(client, provider));
        if let Some((a, b)) = mismatch {
            msg.push_str(&format!("\n  mismatch: {a} vs {b}"));
        }
    } else {
        msg.push_str("\n  note: rerun with --explain to see how both types translate");
    }
}

/// Position of the `main` field in a manifest, for link diagnostics.
fn main_position(text: &str) -> Pos {
    text.lines()
        .enumerate()
        .find_map(|(i, l)| {
            l.find("\"main\"").map(|c| Pos {
                line: i as u32 + 1,
                col: c as u32 + 1,
            })
        })
        .unwrap_or(Pos { line: 1, col: 1 })
}

fn load_manifest(
    path: &Path,
    out: &Out,
) -> Result<std::result::Result<(LinkManifest, String), u8>> {
    let text = read(path)?;
    match LinkManifest::from_json(&text) {
        Ok(m) => Ok(Ok((m, text))),
        Err(e) => {
            out.fail(
                format!("{}:1:1: error: {e}", path.display()),
                json!({"status": "link-error", "file": path, "line": 1, "col": 1, "message": e.to_string()}),
            );
            Ok(Err(LINK_ERROR))
        }
    }
}

fn link_error(path: &Path, text: &str, e: &LinkError, out: &Out) -> u8 {
    match e {
        LinkError::Component(d) => {
            out.diagnostic(d);
        }
        LinkError::Incompatible { verdict, .. } => {
            let pos = main_position(text);
            let mut msg = format!("{}:{pos}: error: {e}", path.display());
            if let CompatVerdict::Incompatible {
                client,
                provider,
                mismatch,
            } = &**verdict
            {
                explain(&mut msg, client, provider, mismatch.as_ref(), out.explain);
            }
            let mut value = verdict.to_json();
            value["status"] = json!("link-error");
            value["message"] = json!(e.to_string());
            value["file"] = json!(path);
            value["line"] = json!(pos.line);
            value["col"] = json!(pos.col);
            out.fail(msg, value);
        }
        other => {
            let pos = main_position(text);
            out.fail(
                format!("{}:{pos}: error: {other}", path.display()),
                json!({"status": "link-error", "file": path, "line": pos.line, "col": pos.col, "message": other.to_string()}),
            );
        }
    }
    LINK_ERROR
}

fn manifest_dir(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

fn link_cmd(path: &Path, out: &Out) -> Result<u8> {
    let (manifest, text) = match load_manifest(path, out)? {
        Ok(m) => m,
        Err(code) => return Ok(code),
    };
    match link(&manifest, manifest_dir(path)) {
        Ok(p) => {
            let code = print(&p.term);
            out.ok(
                format!("{code}\n: {}", p.comp),
                json!({
                    "status": "ok",
                    "manifest": serde_json::to_value(&manifest)?,
                    "program": code,
                    "type": p.comp.to_string(),
                }),
            );
            Ok(OK)
        }
        Err(e) => Ok(link_error(path, &text, &e, out)),
    }
}

fn run_cmd(path: &Path, fuel: u64, out: &Out) -> Result<u8> {
    let (manifest, text) = match load_manifest(path, out)? {
        Ok(m) => m,
        Err(code) => return Ok(code),
    };
    let program = match link(&manifest, manifest_dir(path)) {
        Ok(p) => p,
        Err(e) => return Ok(link_error(path, &text, &e, out)),
    };
    Ok(match eval_target(&program.term, Store::new(), fuel) {
        Outcome::Value(v, _) => {
            let v = print(&v);
            out.ok(&v, json!({"status": "value", "value": v}));
            OK
        }
        Outcome::OutOfFuel => {
            out.fail(
                format!(
                    "{}:1:1: error: out of fuel after {fuel} steps",
                    path.display()
                ),
                json!({"status": "out-of-fuel", "fuel": fuel}),
            );
            OUT_OF_FUEL
        }
        Outcome::Exception(v, _) => {
            let v = print(&v);
            out.fail(
                format!("{}:1:1: error: uncaught exception {v}", path.display()),
                json!({"status": "exception", "value": v}),
            );
            TYPE_ERROR
        }
        Outcome::Stuck(why) => {
            out.fail(
                format!("{}:1:1: error: evaluation is stuck: {why}", path.display()),
                json!({"status": "stuck", "message": why}),
            );
            TYPE_ERROR
        }
    })
}

fn equiv(e1: &Path, e2: &Path, at: &str, suite: &str, fuel: u64, out: &Out) -> Result<u8> {
    let candidate = |p: &Path| -> Result<Candidate> {
        let lang = language_of(p, None, None)?;
        let name = p
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Candidate::parse(name, &read(p)?, lang).map_err(|e| anyhow!("{}: {e}", p.display()))
    };
    let (c1, c2) = (candidate(e1)?, candidate(e2)?);
    let ty = parse_link_type(at, BaseLang::LamRef, ExtensionId::HeapEffect)
        .with_context(|| format!("`{at}` is not a heap-effect linking type"))?;
    let contexts = if suite == "builtin" {
        builtin_suite(&ty)
    } else {
        load_suite(Path::new(suite))?
    };
    let verdict = probe(&c1, &c2, &ty, &contexts, fuel);
    let mut value = verdict.to_json();
    value["at"] = json!(ty.to_string());
    match &verdict {
        EquivVerdict::IllTyped { .. } => {
            out.fail(format!("error: {verdict}"), value);
            Ok(TYPE_ERROR)
        }
        _ => {
            out.ok(
                format!("{}, {} at {ty}: {verdict}", c1.name, c2.name),
                value,
            );
            Ok(OK)
        }
    }
}

fn extensions(out: &Out) -> Result<u8> {
    let registry = Registry::builtin()?;
    let mut human = String::new();
    let mut entries = Vec::new();
    for (spec, report) in registry.iter() {
        human.push_str(&format!(
            "{} (checked {} types, seed {:#x}; {})\n",
            spec.name,
            report.types_checked,
            report.seed,
            if spec.translates {
                "compiles to the target"
            } else {
                "checking only"
            }
        ));
        if !spec.constructors.is_empty() {
            human.push_str(&format!("  types: {}\n", spec.constructors.join(", ")));
        }
        for o in spec.obligations {
            human.push_str(&format!("  obligation: {o}\n"));
        }
        let mut table = Vec::new();
        for row in kappa_table(spec) {
            let lang = LanguageId::from_base(row.base);
            human.push_str(&format!(
                "  {lang}: {} ↦κ+ {} ↦κ− {}\n",
                row.source, row.plus, row.minus
            ));
            table.push(json!({"language": lang.tag(), "source": row.source.to_string(), "kappa_plus": row.plus.to_string(), "kappa_minus": row.minus.to_string()}));
        }
        entries.push(json!({
            "name": spec.name,
            "types": spec.constructors,
            "obligations": spec.obligations,
            "translates": spec.translates,
            "types_checked": report.types_checked,
            "seed": report.seed,
            "kappa": table,
        }));
    }
    out.ok(human.trim_end(), json!({"extensions": entries}));
    Ok(OK)
}
