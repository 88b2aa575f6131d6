// Check a history dump for linearizability.
//
// `cargo run --example check_history -- history.ndjson` checks a file
// written by `quadbench --mode history` or the `record_history` example.
// Without an argument it checks two built-in histories: a correct one and
// one where a concurrent insert makes a moved key reappear.

use std::error::Error;
use std::fs::File;
use std::io::BufReader;

use quadboost::checker::{check_linearizable, read_ndjson};

const GOOD: &str = r#"{"thread":0,"op":"insert","keyX":1,"keyY":0,"result":true,"invoke_ns":0,"response_ns":5}
{"thread":1,"op":"move","keyX":1,"keyY":0,"newKeyX":2,"newKeyY":0,"result":true,"invoke_ns":10,"response_ns":20}
{"thread":2,"op":"insert","keyX":1,"keyY":0,"result":true,"invoke_ns":11,"response_ns":19}
{"thread":1,"op":"contain","keyX":1,"keyY":0,"result":true,"invoke_ns":21,"response_ns":22}
{"thread":1,"op":"contain","keyX":2,"keyY":0,"result":true,"invoke_ns":23,"response_ns":24}
"#;

const LOST_INSERT: &str = r#"{"thread":0,"op":"insert","keyX":1,"keyY":0,"result":true,"invoke_ns":0,"response_ns":5}
{"thread":1,"op":"move","keyX":1,"keyY":0,"newKeyX":2,"newKeyY":0,"result":true,"invoke_ns":10,"response_ns":20}
{"thread":2,"op":"insert","keyX":1,"keyY":0,"result":true,"invoke_ns":11,"response_ns":19}
{"thread":1,"op":"contain","keyX":1,"keyY":0,"result":false,"invoke_ns":21,"response_ns":22}
{"thread":1,"op":"contain","keyX":2,"keyY":0,"result":true,"invoke_ns":23,"response_ns":24}
"#;

fn run_example() -> Result<(), Box<dyn Error>> {
    if let Some(path) = std::env::args().nth(1) {
        let history = read_ndjson(BufReader::new(File::open(&path)?))?;
        let ok = check_linearizable(&history)?;
        println!("{path}: {} events, linearizable: {ok}", history.len());
        if !ok {
            std::process::exit(2);
        }
        return Ok(());
    }
    for (name, text, expect) in [("good", GOOD, true), ("lost insert", LOST_INSERT, false)] {
        let history = read_ndjson(text.as_bytes())?;
        let ok = check_linearizable(&history)?;
        println!("{name}: linearizable: {ok}");
        assert_eq!(ok, expect);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
