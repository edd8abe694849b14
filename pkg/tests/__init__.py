"""Test suite for wespad"""
