//! Every example runs to completion. They run one at a time since some of
//! them read the global live-object counters.

use std::sync::Mutex;

static SERIAL: Mutex<()> = Mutex::new(());

mod basic_dictionary {
    #![allow(dead_code)]
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/basic_dictionary.rs"));

    #[test]
    fn runs() {
        let _serial = super::SERIAL.lock().unwrap_or_else(|e| e.into_inner());
        run_example().unwrap();
    }
}

mod move_keys {
    #![allow(dead_code)]
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/move_keys.rs"));

    #[test]
    fn runs() {
        let _serial = super::SERIAL.lock().unwrap_or_else(|e| e.into_inner());
        run_example().unwrap();
    }
}

mod compression {
    #![allow(dead_code)]
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/compression.rs"));

    #[test]
    fn runs() {
        let _serial = super::SERIAL.lock().unwrap_or_else(|e| e.into_inner());
        run_example().unwrap();
    }
}

mod variants_compare {
    #![allow(dead_code)]
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/variants_compare.rs"));

    #[test]
    fn runs() {
        let _serial = super::SERIAL.lock().unwrap_or_else(|e| e.into_inner());
        run_example().unwrap();
    }
}

mod record_history {
    #![allow(dead_code)]
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/record_history.rs"));

    #[test]
    fn runs() {
        let _serial = super::SERIAL.lock().unwrap_or_else(|e| e.into_inner());
        run_example().unwrap();
    }
}

mod check_history {
    #![allow(dead_code)]
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/check_history.rs"));

    #[test]
    fn runs() {
        let _serial = super::SERIAL.lock().unwrap_or_else(|e| e.into_inner());
        run_example().unwrap();
    }
}

mod throughput {
    #![allow(dead_code)]
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/throughput.rs"));

    #[test]
    fn runs() {
        let _serial = super::SERIAL.lock().unwrap_or_else(|e| e.into_inner());
        run_example().unwrap();
    }
}

mod node_count {
    #![allow(dead_code)]
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/node_count.rs"));

    #[test]
    fn runs() {
        let _serial = super::SERIAL.lock().unwrap_or_else(|e| e.into_inner());
        run_example().unwrap();
    }
}

mod observer_hooks {
    #![allow(dead_code)]
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/observer_hooks.rs"));

    #[test]
    fn runs() {
        let _serial = super::SERIAL.lock().unwrap_or_else(|e| e.into_inner());
        run_example().unwrap();
    }
}

mod reclamation {
    #![allow(dead_code)]
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/reclamation.rs"));

    #[test]
    fn runs() {
        let _serial = super::SERIAL.lock().unwrap_or_else(|e| e.into_inner());
        run_example().unwrap();
    }
}
