//! Maps JSON paths such as `psi_set[1].bloch` to line/column positions in
//! the source text, so that semantic errors can point at the offending value.

use std::collections::HashMap;

pub struct Locator {
    positions: HashMap<String, (usize, usize)>,
}

impl Locator {
    /// Scans `src`; malformed input yields a partial map, which is fine
    /// because it is only consulted after serde has accepted the text.
    pub fn new(src: &str) -> Self {
        let mut s = Scanner { bytes: src.as_bytes(), pos: 0, line: 1, col: 1, positions: HashMap::new() };
        s.value(String::new());
        Self { positions: s.positions }
    }

    /// Position of `path`, falling back to the nearest recorded ancestor.
    pub fn find(&self, path: &str) -> Option<(usize, usize)> {
        let mut p = path.to_string();
        loop {
            if let Some(&pos) = self.positions.get(&p) {
                return Some(pos);
            }
            match p.rfind(['.', '[']) {
                Some(cut) => p.truncate(cut),
                None if p.is_empty() => return None,
                None => p.clear(),
            }
        }
    }
}

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
    positions: HashMap<String, (usize, usize)>,
}

impl Scanner<'_> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else if b & 0xC0 != 0x80 {
            self.col += 1;
        }
        Some(b)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.bump();
        }
    }

    fn string(&mut self) -> String {
        let start = self.pos + 1;
        self.bump();
        while let Some(b) = self.bump() {
            match b {
                b'\\' => {
                    self.bump();
                }
                b'"' => break,
                _ => {}
            }
        }
        let end = self.pos.saturating_sub(1).max(start);
        String::from_utf8_lossy(&self.bytes[start..end]).into_owned()
    }

    fn value(&mut self, path: String) {
        self.skip_ws();
        self.positions.insert(path.clone(), (self.line, self.col));
        match self.peek() {
            Some(b'{') => {
                self.bump();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(b'"') => {
                            let key = self.string();
                            self.skip_ws();
                            if self.peek() == Some(b':') {
                                self.bump();
                            }
                            let child = if path.is_empty() { key } else { format!("{path}.{key}") };
                            self.value(child);
                        }
                        Some(b',') => {
                            self.bump();
                        }
                        Some(b'}') => {
                            self.bump();
                            return;
                        }
                        _ => return,
                    }
                }
            }
            Some(b'[') => {
                self.bump();
                let mut i = 0;
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(b']') => {
                            self.bump();
                            return;
                        }
                        Some(b',') => {
                            self.bump();
                        }
                        Some(_) => {
                            self.value(format!("{path}[{i}]"));
                            i += 1;
                        }
                        None => return,
                    }
                }
            }
            Some(b'"') => {
                self.string();
            }
            Some(_) => {
                while let Some(b) = self.peek() {
                    if matches!(b, b',' | b'}' | b']' | b' ' | b'\t' | b'\n' | b'\r') {
                        break;
                    }
                    self.bump();
                }
            }
            None => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_nested_values() {
        let src = "{\n  \"a\": [1,\n    {\"b\": [0.5, 2]}],\n  \"c\": \"x,y\"\n}";
        let loc = Locator::new(src);
        assert_eq!(loc.find("a"), Some((2, 8)));
        assert_eq!(loc.find("a[1].b[1]"), Some((3, 17)));
        assert_eq!(loc.find("c"), Some((4, 8)));
        assert_eq!(loc.find("a[1].missing"), Some((3, 5)));
        assert_eq!(loc.find("zzz"), Some((1, 1)));
    }
}
