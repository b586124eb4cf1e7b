"""Exhaustion of the disc by subdiscs and the monotone limit of the approximating flows."""
