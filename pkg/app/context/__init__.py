"""Window contexts: membership, masks, sibling groups and pair samples."""
