use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use flg_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(flg_last_error()) }.to_string_lossy().into_owned()
}

fn parse_graph(text: &str) -> *mut FlgGraph {
    let c = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { flg_graph_parse(c.as_ptr(), &mut g) }, FlgStatus::Ok, "{}", last_error());
    g
}

#[test]
fn recognize_and_round_trip() {
    let g = parse_graph("p ugr 4 4\ne 1 2\ne 2 3\ne 3 4\ne 4 1\n");
    unsafe {
        assert_eq!(flg_graph_node_count(g), 4);
        assert_eq!(flg_graph_edge_count(g), 4);
        let mut d = ptr::null_mut();
        assert_eq!(flg_recognize(g, &mut d), FlgStatus::Ok);
        assert_eq!(flg_digraph_arc_count(d), 4);

        // The preimage's intersection graph is the input, arc i = node i.
        let mut back = ptr::null_mut();
        assert_eq!(flg_intersection_graph(d, &mut back), FlgStatus::Ok);
        for u in 0..4 {
            for v in 0..4 {
                assert_eq!(flg_graph_has_edge(g, u, v), flg_graph_has_edge(back, u, v));
            }
        }

        let mut text = ptr::null_mut();
        assert_eq!(flg_digraph_to_text(d, &mut text), FlgStatus::Ok);
        let s = CStr::from_ptr(text).to_str().unwrap().to_owned();
        flg_string_free(text);
        let mut d2 = ptr::null_mut();
        let c = CString::new(s).unwrap();
        assert_eq!(flg_digraph_parse(c.as_ptr(), &mut d2), FlgStatus::Ok);
        for a in 0..4 {
            let (mut t1, mut h1, mut t2, mut h2) = (0, 0, 0, 0);
            assert_eq!(flg_digraph_arc(d, a, &mut t1, &mut h1), FlgStatus::Ok);
            assert_eq!(flg_digraph_arc(d2, a, &mut t2, &mut h2), FlgStatus::Ok);
            assert_eq!((t1, h1), (t2, h2));
        }
        assert_eq!(flg_digraph_arc(d, 9, &mut 0, &mut 0), FlgStatus::InvalidArgument);

        flg_digraph_free(d2);
        flg_graph_free(back);
        flg_digraph_free(d);
        flg_graph_free(g);
    }
}

#[test]
fn refusal_and_error_codes() {
    let k23 = parse_graph("p ugr 5 6\ne 1 3\ne 1 4\ne 1 5\ne 2 3\ne 2 4\ne 2 5\n");
    let k3 = parse_graph("p ugr 3 3\ne 1 2\ne 2 3\ne 1 3\n");
    unsafe {
        let mut d = ptr::null_mut();
        assert_eq!(flg_recognize(k23, &mut d), FlgStatus::No);
        assert!(d.is_null());
        assert!(last_error().contains("2 independent cycles"));
        assert_eq!(flg_has_preimage(k23, 1_000_000), FlgStatus::No);

        assert_eq!(flg_recognize(k3, &mut d), FlgStatus::Triangle);
        assert_eq!(flg_has_preimage(k3, 1_000_000), FlgStatus::Ok);
        assert_eq!(flg_recognize(ptr::null(), &mut d), FlgStatus::NullArgument);

        let bad = CString::new("p ugr 2 1\nx 1 2\n").unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(flg_graph_parse(bad.as_ptr(), &mut g), FlgStatus::Parse);
        assert!(g.is_null());
        assert!(last_error().starts_with("line 2"), "{}", last_error());
        let bad = CString::new("p ugr 2 1\ne 1 7\n").unwrap();
        assert_ne!(flg_graph_parse(bad.as_ptr(), &mut g), FlgStatus::Ok);
        assert!(g.is_null());

        flg_graph_free(k23);
        flg_graph_free(k3);
        flg_graph_free(ptr::null_mut());
    }
}

#[test]
fn building_colouring_and_stable_sets() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(flg_graph_new(5, &mut g), FlgStatus::Ok);
        for i in 0..5 {
            assert_eq!(flg_graph_add_edge(g, i, (i + 1) % 5), FlgStatus::Ok);
        }
        assert_eq!(flg_graph_add_edge(g, 0, 0), FlgStatus::InvalidArgument);
        assert_eq!(flg_graph_add_edge(g, 0, 1), FlgStatus::InvalidArgument);

        let mut colors = [0usize; 5];
        let mut count = 0;
        assert_eq!(flg_color(g, colors.as_mut_ptr(), 5, &mut count), FlgStatus::Ok);
        assert_eq!(count, 3);
        for i in 0..5 {
            assert_ne!(colors[i], colors[(i + 1) % 5]);
        }
        assert_eq!(flg_color(g, colors.as_mut_ptr(), 4, &mut count), FlgStatus::BufferTooSmall);

        let mut in_set = [9u8; 5];
        let (mut num, mut den) = (0, 0);
        assert_eq!(flg_max_stable_set(g, in_set.as_mut_ptr(), 5, &mut num, &mut den), FlgStatus::Ok);
        assert_eq!((num, den), (2, 1));
        assert_eq!(in_set.iter().map(|&b| b as usize).sum::<usize>(), 2);
        flg_graph_free(g);

        let mut d = ptr::null_mut();
        assert_eq!(flg_digraph_new(3, &mut d), FlgStatus::Ok);
        let mut idx = 99;
        assert_eq!(flg_digraph_add_arc(d, 0, 1, &mut idx), FlgStatus::Ok);
        assert_eq!(idx, 0);
        assert_eq!(flg_digraph_add_arc(d, 1, 2, ptr::null_mut()), FlgStatus::Ok);
        assert_eq!(flg_digraph_add_arc(d, 1, 5, ptr::null_mut()), FlgStatus::InvalidArgument);
        let mut p2 = ptr::null_mut();
        assert_eq!(flg_intersection_graph(d, &mut p2), FlgStatus::Ok);
        assert_eq!(flg_graph_edge_count(p2), 1);
        flg_graph_free(p2);
        flg_digraph_free(d);
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"flg.h\"\nint main(void) { FlgGraph *g = 0; return flg_graph_new(3, &g) == FLG_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&src)
            .arg("-I")
            .arg(&include)
            .status()
            .unwrap_or_else(|e| panic!("{compiler} not runnable: {e}"));
        assert!(status.success(), "{compiler} rejected the header");
    }
}
