"""Tests for quantum-curves"""
