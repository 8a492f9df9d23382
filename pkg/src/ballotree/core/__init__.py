# Core modules: tournaments, voting trees, constructions, F3 gates, verification
