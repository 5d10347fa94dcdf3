use clap::Subcommand;
use valdef_core::valfield::Catalog;

use crate::{input_error, to_json, Format};

#[derive(Subcommand, Debug)]
pub enum Action {
    /// Names of every base field
    List,
    /// One base field with all its flags
    Show { name: String },
}

fn yes_no(f: Option<bool>) -> &'static str {
    match f {
        Some(true) => "yes",
        Some(false) => "no",
        None => "unknown",
    }
}

pub fn run(action: Action, catalog: &Catalog, format: Format) -> anyhow::Result<u8> {
    match action {
        Action::List => match format {
            Format::Json => println!("{}", to_json(&catalog.names().collect::<Vec<_>>())),
            Format::Human => {
                for f in catalog.fields() {
                    println!("{:16} characteristic {}, henselian {}", f.name, f.characteristic, yes_no(f.henselian));
                }
            }
        },
        Action::Show { name } => {
            let f = catalog.get(&name).map_err(|e| input_error(e.to_string()))?;
            // shown as a catalog entry in either format
            println!("{}", to_json(f));
        }
    }
    Ok(0)
}
