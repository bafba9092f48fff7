//! Command-line surface over the product-line registry.
//!
//! Reads resolve the store from `--store` or `SPLTREE_STORE` and print in
//! deterministic order, one result per line (or raw XML with
//! `--format xml`). Mutations lock the store, apply in memory, and rewrite
//! both files atomically, so a failed command changes nothing on disk.

mod error;
mod store;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Parser, Subcommand, ValueEnum};

use spltree::{
    from_xml, parse_date, save_metadata, to_xml, DevelopmentTree, MetadataDocument,
    MetadataRecord, NodeId, TestResult, TreeError,
};

use crate::error::{io_error, CliError};
use crate::store::{load, save, Store, StoreLocator, StoreLock};

#[derive(Parser)]
#[command(name = "spltree", version, about = "Product-line development-tree registry")]
struct Cli {
    /// Store tree file; its metadata sidecar lives beside it.
    #[arg(
        short,
        long,
        global = true,
        env = "SPLTREE_STORE",
        value_name = "FILE"
    )]
    store: Option<PathBuf>,

    /// Output encoding for read commands.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Lines)]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Lines,
    Xml,
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OutputFormat::Lines => f.write_str("lines"),
            OutputFormat::Xml => f.write_str("xml"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ResultArg {
    Pass,
    Fail,
}

#[derive(Subcommand)]
enum Command {
    /// Create an empty store file.
    Init { file: PathBuf },
    /// Add a base component to the repository.
    AddComponent { id: String },
    /// Add a new version of an existing component.
    AddVersion { base: String, new: String },
    /// Add a product with an empty composition.
    AddProduct { id: String },
    /// Append components to a base product's composition.
    Compose {
        product: String,
        #[arg(required = true)]
        components: Vec<String>,
    },
    /// Add a new product version with its composition fixed at creation.
    AddProductVersion {
        base: String,
        new: String,
        /// Components of the new version's composition.
        #[arg(long = "with", value_name = "COMPONENT", num_args = 1..)]
        with: Vec<String>,
    },
    /// Remove a node; --force also removes its version subtree and purges
    /// composition entries referencing removed nodes.
    Remove {
        id: String,
        #[arg(long)]
        force: bool,
    },
    /// Rename a node, rewriting composition references and metadata.
    Rename { id: String, new: String },
    /// List node ids in document order.
    List {
        /// Components only (bases and versions).
        #[arg(long, conflicts_with = "products")]
        components: bool,
        /// Products only (bases and versions).
        #[arg(long)]
        products: bool,
    },
    /// Version path of a component, oldest first.
    History { id: String },
    /// Leaf versions of a component's version tree.
    Latest { component: String },
    /// Products using a component, directly and across its version tree.
    WhereUsed { component: String },
    /// Composition entries of a product.
    Composition { product: String },
    /// Version path of a product, oldest first.
    Lineage { product: String },
    /// Print the whole tree, depth-indented.
    Traverse,
    /// Validate a tree document file and report every violation.
    Validate { file: PathBuf },
    /// Write the store document canonically to stdout or a file.
    Export {
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Replace the store with a validated document.
    Import { file: PathBuf },
    /// Read or write per-node metadata.
    Meta {
        #[command(subcommand)]
        command: MetaCommand,
    },
}

#[derive(Subcommand)]
enum MetaCommand {
    /// Set the metadata record of a node.
    Set {
        id: String,
        #[arg(long)]
        author: String,
        #[arg(long, value_name = "YYYY-MM-DD", value_parser = parse_date_arg)]
        developed: NaiveDate,
        #[arg(long, value_name = "YYYY-MM-DD", value_parser = parse_date_arg)]
        released: Option<NaiveDate>,
        #[arg(long, value_name = "YYYY-MM-DD", value_parser = parse_date_arg)]
        tested: Option<NaiveDate>,
        #[arg(long, value_enum, requires = "tested")]
        result: Option<ResultArg>,
        #[arg(long)]
        notes: Option<String>,
    },
    /// Print the metadata record of a node, if any.
    Get { id: String },
}

fn parse_date_arg(value: &str) -> Result<NaiveDate, String> {
    parse_date(value).ok_or_else(|| format!("expected a zero-padded YYYY-MM-DD date, got {value:?}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("ERROR {}: {}", error.code(), error);
            error.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let format = cli.format;
    match cli.command {
        Command::Init { file } => {
            if file.exists() {
                return Err(CliError::Io {
                    path: file,
                    source: std::io::Error::new(
                        std::io::ErrorKind::AlreadyExists,
                        "store file already exists",
                    ),
                });
            }
            let doc = to_xml(&DevelopmentTree::new()).expect("empty tree is valid");
            store::write_atomic(&file, doc.as_bytes())?;
        }
        Command::AddComponent { id } => mutate(&cli.store, |store| {
            store.tree.add_component(parse_id(&id)?)?;
            Ok(())
        })?,
        Command::AddVersion { base, new } => mutate(&cli.store, |store| {
            store.tree.add_component_version(&parse_id(&base)?, parse_id(&new)?)?;
            Ok(())
        })?,
        Command::AddProduct { id } => mutate(&cli.store, |store| {
            store.tree.add_product(parse_id(&id)?)?;
            Ok(())
        })?,
        Command::Compose {
            product,
            components,
        } => mutate(&cli.store, |store| {
            let product = parse_id(&product)?;
            for component in &components {
                store.tree.add_to_composition(&product, &parse_id(component)?)?;
            }
            Ok(())
        })?,
        Command::AddProductVersion { base, new, with } => mutate(&cli.store, |store| {
            let composition = with
                .iter()
                .map(|c| parse_id(c))
                .collect::<Result<Vec<_>, _>>()?;
            store
                .tree
                .add_product_version(&parse_id(&base)?, parse_id(&new)?, &composition)?;
            Ok(())
        })?,
        Command::Remove { id, force } => mutate(&cli.store, |store| {
            let removed = store.tree.remove_node(&parse_id(&id)?, force)?;
            for gone in &removed {
                store.meta.remove(gone);
            }
            Ok(())
        })?,
        Command::Rename { id, new } => mutate(&cli.store, |store| {
            let old = parse_id(&id)?;
            let new = parse_id(&new)?;
            store.tree.rename_node(&old, new.clone())?;
            store.meta.rename(&old, new);
            Ok(())
        })?,
        Command::List {
            components,
            products,
        } => {
            let store = load_store(&cli.store)?;
            let ids = if components {
                store.tree.list_core_assets()
            } else if products {
                store.tree.list_products()
            } else {
                let mut all = store.tree.list_core_assets();
                all.extend(store.tree.list_products());
                all
            };
            print_ids(format, &ids);
        }
        Command::History { id } => {
            let store = load_store(&cli.store)?;
            print_ids(format, &store.tree.version_history(&parse_id(&id)?)?);
        }
        Command::Latest { component } => {
            let store = load_store(&cli.store)?;
            print_ids(format, &store.tree.latest_versions(&parse_id(&component)?)?);
        }
        Command::WhereUsed { component } => {
            let store = load_store(&cli.store)?;
            let report = store.tree.where_used(&parse_id(&component)?)?;
            match format {
                OutputFormat::Lines => {
                    println!("direct:{}", joined(&report.direct_users));
                    println!("lineage:{}", joined(&report.lineage_users));
                }
                OutputFormat::Xml => {
                    let mut out = xml_header();
                    out.push_str("<Result>\n  <Direct>\n");
                    for id in &report.direct_users {
                        out.push_str(&format!("    <{id}></{id}>\n"));
                    }
                    out.push_str("  </Direct>\n  <Lineage>\n");
                    for id in &report.lineage_users {
                        out.push_str(&format!("    <{id}></{id}>\n"));
                    }
                    out.push_str("  </Lineage>\n</Result>\n");
                    print!("{out}");
                }
            }
        }
        Command::Composition { product } => {
            let store = load_store(&cli.store)?;
            print_ids(format, &store.tree.composition(&parse_id(&product)?)?);
        }
        Command::Lineage { product } => {
            let store = load_store(&cli.store)?;
            print_ids(format, &store.tree.product_lineage(&parse_id(&product)?)?);
        }
        Command::Traverse => {
            let store = load_store(&cli.store)?;
            match format {
                OutputFormat::Lines => {
                    for entry in store.tree.traverse() {
                        println!("{}{}", "  ".repeat(entry.depth), entry.id);
                    }
                }
                OutputFormat::Xml => {
                    print!("{}", to_xml(&store.tree).map_err(CliError::Domain)?);
                }
            }
        }
        Command::Validate { file } => {
            let text = fs::read_to_string(&file).map_err(io_error(&file))?;
            let report = spltree::validate(&text);
            if report.valid {
                println!("valid");
            } else {
                for issue in &report.issues {
                    println!("{issue}");
                }
                return Ok(ExitCode::from(1));
            }
        }
        Command::Export { output } => {
            let store = load_store(&cli.store)?;
            let doc = to_xml(&store.tree).map_err(CliError::Domain)?;
            match output {
                Some(path) => store::write_atomic(&path, doc.as_bytes())?,
                None => print!("{doc}"),
            }
        }
        Command::Import { file } => {
            let locator = locator(&cli.store)?;
            let _lock = StoreLock::acquire(&locator)?;
            let text = fs::read_to_string(&file).map_err(io_error(&file))?;
            let tree = from_xml(&text)?;
            let mut meta = if locator.meta_path.exists() {
                let text =
                    fs::read_to_string(&locator.meta_path).map_err(io_error(&locator.meta_path))?;
                spltree::load_metadata(&text)?
            } else {
                MetadataDocument::new()
            };
            // Records for nodes absent from the imported tree would be
            // orphans; retire them with the import.
            for orphan in meta.reconcile(&tree) {
                meta.remove(&orphan);
            }
            save(&locator, &Store { tree, meta })?;
        }
        Command::Meta { command } => match command {
            MetaCommand::Set {
                id,
                author,
                developed,
                released,
                tested,
                result,
                notes,
            } => mutate(&cli.store, |store| {
                let id = parse_id(&id)?;
                if !store.tree.contains(&id) {
                    return Err(CliError::Domain(TreeError::UnknownNode(id)));
                }
                let mut record = MetadataRecord::new(author.clone(), developed);
                record.release_date = released;
                record.test_date = tested;
                record.test_result = result.map(|r| match r {
                    ResultArg::Pass => TestResult::Pass,
                    ResultArg::Fail => TestResult::Fail,
                });
                record.notes = notes.clone();
                store.meta.set(id, record)?;
                Ok(())
            })?,
            MetaCommand::Get { id } => {
                let store = load_store(&cli.store)?;
                let id = parse_id(&id)?;
                let record = store.meta.get(&id);
                match format {
                    OutputFormat::Lines => {
                        if let Some(record) = record {
                            println!("author: {}", record.author);
                            println!("developed: {}", record.developed_date);
                            if let Some(date) = record.release_date {
                                println!("released: {date}");
                            }
                            if let Some(date) = record.test_date {
                                println!("tested: {date}");
                            }
                            if let Some(result) = record.test_result {
                                println!("result: {result}");
                            }
                            if let Some(notes) = &record.notes {
                                println!("notes: {notes}");
                            }
                        }
                    }
                    OutputFormat::Xml => {
                        let mut doc = MetadataDocument::new();
                        if let Some(record) = record {
                            doc.set(id, record.clone()).expect("stored records are valid");
                        }
                        print!("{}", save_metadata(&doc));
                    }
                }
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn locator(cli_store: &Option<PathBuf>) -> Result<StoreLocator, CliError> {
    cli_store
        .clone()
        .map(StoreLocator::new)
        .ok_or_else(|| CliError::Usage("no store file; pass --store or set SPLTREE_STORE".into()))
}

fn load_store(cli_store: &Option<PathBuf>) -> Result<Store, CliError> {
    load(&locator(cli_store)?)
}

/// Lock, load, apply, save. Nothing reaches disk unless `apply` succeeds.
fn mutate(
    cli_store: &Option<PathBuf>,
    apply: impl FnOnce(&mut Store) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let locator = locator(cli_store)?;
    let _lock = StoreLock::acquire(&locator)?;
    let mut store = load(&locator)?;
    apply(&mut store)?;
    save(&locator, &store)
}

fn parse_id(value: &str) -> Result<NodeId, CliError> {
    NodeId::new(value).map_err(CliError::Domain)
}

fn joined(ids: &[NodeId]) -> String {
    ids.iter().map(|id| format!(" {id}")).collect()
}

fn xml_header() -> String {
    "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n".to_owned()
}

fn print_ids(format: OutputFormat, ids: &[NodeId]) {
    match format {
        OutputFormat::Lines => {
            for id in ids {
                println!("{id}");
            }
        }
        OutputFormat::Xml => {
            let mut out = xml_header();
            if ids.is_empty() {
                out.push_str("<Result></Result>\n");
            } else {
                out.push_str("<Result>\n");
                for id in ids {
                    out.push_str(&format!("  <{id}></{id}>\n"));
                }
                out.push_str("</Result>\n");
            }
            print!("{out}");
        }
    }
}
