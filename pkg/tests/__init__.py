"""Tests for breg"""
