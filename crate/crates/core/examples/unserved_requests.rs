use cachesim::matching::{build_request_graph, max_matching};
use cachesim::ppmm::ppmm_deliver;
use cachesim::{PlacementMap, RequestBatch, StorageProfile};

// Three users ask for h, g and g. Only the first cache holds h; nobody holds g.
fn main() {
    let (g, h) = (0, 1);
    let profile = StorageProfile::from_capacities(vec![1, 1, 1]).unwrap();
    let mut placement = PlacementMap::empty(&profile, 2);
    placement.place(h, 0).unwrap();

    let batch = RequestBatch::from_requests(vec![h, g, g], 2).unwrap();
    let graph = build_request_graph(&batch, &placement);
    println!("edges: {}", graph.edge_count());
    println!("matching size: {}", max_matching(&graph).len());

    let report = ppmm_deliver(&batch, &placement);
    println!("served from caches: {:?}", report.assignment);
    println!("server sends {} file(s)", report.rate);
}
