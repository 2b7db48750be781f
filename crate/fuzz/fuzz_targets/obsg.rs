#![no_main]

use libfuzzer_sys::fuzz_target;
use tracescore_core::datagen::{generate_obsg, ProviderError, TextProvider};

struct Reply(String);

impl TextProvider for Reply {
    fn complete(&self, _: &str) -> Result<String, ProviderError> {
        Ok(self.0.clone())
    }
}

fuzz_target!(|data: &[u8]| {
    let reply = Reply(String::from_utf8_lossy(data).into_owned());
    if let Ok(out) = generate_obsg("prompt", &reply, 0) {
        out.obsg.validate().expect("accepted graphs are valid");
    }
});
