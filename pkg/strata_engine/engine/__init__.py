# Engine package: combinatorics, homology, oracle, storage and rendering components
