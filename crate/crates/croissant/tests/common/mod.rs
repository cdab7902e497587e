//! Reference implementations used to cross-check the production numerics.
//!
//! Deliberately primitive and independent of the library's code paths: the
//! CDF oracle integrates the density with Simpson's rule, and the quantile
//! oracle bisects that integral. Slow but trustworthy to ~1e-13.

#![allow(dead_code)] // each integration-test binary uses a subset

/// Standard normal density, written out longhand.
pub fn std_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Simpson's rule over [a, b] with a fixed even step count.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
    assert!(steps % 2 == 0 && steps >= 2);
    let h = (b - a) / steps as f64;
    let mut total = f(a) + f(b);
    for i in 1..steps {
        let w = if i % 2 == 0 { 2.0 } else { 4.0 };
        total += w * f(a + i as f64 * h);
    }
    total * h / 3.0
}

/// Standard normal CDF by integrating the density from the mean outward.
/// Absolute error well under 1e-13 for |z| ≤ 9.
pub fn cdf_oracle(z: f64) -> f64 {
    if z < -9.0 {
        // Mass beyond 9 sigma is ~1e-19, below every tolerance used here.
        return 0.0;
    }
    if z > 9.0 {
        return 1.0;
    }
    if z >= 0.0 {
        0.5 + simpson(std_pdf, 0.0, z, 8192)
    } else {
        0.5 - simpson(std_pdf, z, 0.0, 8192)
    }
}

/// Standard normal quantile by bisecting the CDF oracle to ~1e-13 in x.
pub fn quantile_oracle(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0);
    let (mut lo, mut hi) = (-9.0_f64, 9.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf_oracle(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Panics unless `xml` is structurally well-formed: one root element,
/// balanced matching tags, quoted attributes, and only known character
/// entities. A deliberately small stand-in for a full parser — enough to
/// catch unclosed tags, bad nesting, and unescaped text.
pub fn assert_well_formed_xml(xml: &str) {
    let mut rest = xml;
    if let Some(stripped) = rest.strip_prefix("<?xml") {
        let end = stripped.find("?>").expect("unterminated xml declaration");
        rest = &stripped[end + 2..];
    }

    let mut stack: Vec<&str> = Vec::new();
    let mut roots = 0usize;
    let mut chars = rest.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c == '&' {
            let tail = &rest[i..];
            let known = ["&amp;", "&lt;", "&gt;", "&quot;", "&apos;"]
                .iter()
                .any(|e| tail.starts_with(e))
                || (tail.starts_with("&#") && tail[2..].chars().take_while(|c| *c != ';').all(|c| c.is_ascii_digit()) && tail[2..].contains(';'));
            assert!(known, "unescaped ampersand at byte {i}");
            continue;
        }
        if c != '<' {
            assert!(
                !stack.is_empty() || c.is_whitespace(),
                "text outside the root element at byte {i}"
            );
            continue;
        }
        let tail = &rest[i..];
        if tail.starts_with("<!--") {
            let end = tail.find("-->").expect("unterminated comment");
            while chars.peek().is_some_and(|&(j, _)| j < i + end + 3) {
                chars.next();
            }
            continue;
        }
        // Find the closing '>' outside quoted attribute values.
        let mut in_quote = false;
        let mut end = None;
        for (j, d) in tail.char_indices().skip(1) {
            match d {
                '"' => in_quote = !in_quote,
                '<' if !in_quote => panic!("raw '<' inside tag at byte {}", i + j),
                '>' if !in_quote => {
                    end = Some(j);
                    break;
                }
                _ => {}
            }
        }
        let end = end.expect("unterminated tag");
        let tag = &tail[1..end];
        while chars.peek().is_some_and(|&(j, _)| j <= i + end) {
            chars.next();
        }

        if let Some(name) = tag.strip_prefix('/') {
            let open = stack.pop().unwrap_or_else(|| panic!("stray closing tag </{name}>"));
            assert_eq!(open, name.trim(), "mismatched closing tag at byte {i}");
        } else {
            let self_closing = tag.ends_with('/');
            let body = tag.trim_end_matches('/');
            let name = body.split_whitespace().next().expect("empty tag");
            // Attributes: each = must be followed by a quoted value.
            let attrs = &body[name.len()..];
            let quotes = attrs.matches('"').count();
            assert!(quotes % 2 == 0, "unbalanced attribute quotes in <{name}> at byte {i}");
            assert_eq!(
                attrs.matches('=').count(),
                quotes / 2,
                "unquoted attribute value in <{name}> at byte {i}"
            );
            if stack.is_empty() {
                roots += 1;
            }
            if !self_closing {
                stack.push(name);
            }
        }
    }
    assert!(stack.is_empty(), "unclosed tags: {stack:?}");
    assert_eq!(roots, 1, "expected exactly one root element, found {roots}");
}
