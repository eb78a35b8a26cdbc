"""Lyndon permutations, flag products and pattern densities in blow-up permutons."""
