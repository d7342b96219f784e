//! Label vocabulary: the default three-way polarity schema and a custom one.

use polarvote::{parse_label, LabelSchema};

fn main() -> polarvote::Result<()> {
    let schema = LabelSchema::default();
    for id in schema.ids() {
        println!("{} -> {}", id.0, schema.name(id));
    }

    // case and surrounding whitespace are ignored
    let id = parse_label("  positive ", &schema)?;
    println!("\"  positive \" parses to {}", schema.name(id));

    match parse_label("Mixed", &schema) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    let custom = LabelSchema::parse("Offensive\nNot offensive\n")?;
    print!("custom schema file:\n{}", custom.to_file_string());
    Ok(())
}
