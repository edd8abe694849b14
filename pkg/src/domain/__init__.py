"""Domain models for posts, corpora, dependency trees and errors"""
