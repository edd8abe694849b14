"""Input loaders for posts, embedding tables and CoNLL dependency trees"""
